"""PNG renderings of the CSV outputs.  Agg backend, no timestamps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "figure.figsize": (5.0, 3.4),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def spectrum(rows_e: list[dict], rows_p: list[dict], path):
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
        for ratio in sorted({r["ratio"] for r in rows_e}):
            sel = [r for r in rows_e if r["ratio"] == ratio]
            x = [r["delta_over_omega"] for r in sel]
            for k in range(3):
                ax1.plot(x, [r[f"E{k}_over_omega"] for r in sel],
                         label=f"{ratio:g}" if k == 0 else None)
            selp = [r for r in rows_p if r["ratio"] == ratio]
            ax2.plot(x, [r["pop_rr"] for r in selp], label=f"rr, {ratio:g}")
            ax2.plot(x, [r["pop_b"] for r in selp], "--", label=f"b, {ratio:g}")
        ax1.set_xlabel(r"$\Delta/\Omega$")
        ax1.set_ylabel(r"pair energy $/\Omega$")
        ax1.legend(title=r"$\hbar\Omega/|V|$")
        ax2.set_xlabel(r"$\Delta/\Omega$")
        ax2.set_ylabel("population of dressed |1,1>")
        ax2.legend(ncol=2)
        _save(fig, path)


def trajectory(traj, ramp_omega, ramp_delta, path):
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
        t = traj.times
        ax1.plot(t, ramp_omega, label=r"$\Omega$")
        ax1.plot(t, ramp_delta, label=r"$\Delta$")
        ax1.set_ylabel(r"$/\Omega_{\rm eff}^{\max}$")
        ax1.legend()
        pops = np.abs(traj.amplitudes) ** 2
        for idx, lab in ((4, "1,1"), (5, "1,r"), (8, "r,r")):
            ax2.plot(t, pops[:, idx], label=lab)
        ax2.plot(t, traj.pr1 + traj.pr2, "k:", label=r"$P_r^{(1)}+P_r^{(2)}$")
        ax2.set_xlabel(r"$t\,\Omega_{\rm eff}^{\max}$")
        ax2.set_ylabel("population")
        ax2.legend(ncol=2)
        _save(fig, path)


def convergence(log_values: list[float], path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        v = np.array(log_values, dtype=float)
        ax.semilogy(np.arange(v.size), np.maximum(v, 1e-16), ".", ms=3, label="evaluation")
        ax.semilogy(np.arange(v.size), np.maximum(np.minimum.accumulate(v), 1e-16),
                    label="best so far")
        ax.set_xlabel("evaluation")
        ax.set_ylabel("objective")
        ax.legend()
        _save(fig, path)


def landscape(rows: list[dict], path):
    ok = [r for r in rows if not r.get("error")]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if ok:
            xs = sorted({r["omega_per_2pi_gamma_r"] for r in ok})
            ys = sorted({r["gamma_a_per_gamma_r"] for r in ok})
            z = np.full((len(ys), len(xs)), np.nan)
            for r in ok:
                z[ys.index(r["gamma_a_per_gamma_r"]), xs.index(r["omega_per_2pi_gamma_r"])] = \
                    r["log10_infidelity"]
            if len(xs) > 1 and len(ys) > 1:
                cs = ax.contourf(xs, ys, z, levels=12)
                fig.colorbar(cs, ax=ax, label=r"$\log_{10}(1-F)$")
                ax.set_xscale("log")
                ax.set_yscale("log")
            else:
                ax.plot(xs if len(xs) > 1 else ys, z.ravel(), "o-")
        ax.set_xlabel(r"$\Omega_{1a}^{\max}/(2\pi\Gamma_r)$")
        ax.set_ylabel(r"$\Gamma_a/\Gamma_r$")
        _save(fig, path)


def tr_scan(rows: list[dict], path):
    ok = [r for r in rows if not r.get("error")]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for fam in sorted({r["family"] for r in ok}):
            sel = sorted((r for r in ok if r["family"] == fam), key=lambda r: r["ratio"])
            ax.loglog([r["ratio"] for r in sel], [r["t_r_times_V"] for r in sel], "o-",
                      label=fam)
        ax.axhline(4 * np.pi, color="k", ls=":", label=r"$4\pi\hbar/|V|$")
        ax.set_xlabel(r"$\hbar\Omega_{\rm eff}^{\max}/|V|$")
        ax.set_ylabel(r"$t_r\,|V|/\hbar$")
        ax.legend()
        _save(fig, path)


def forces(rows: list[dict], path):
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
        r = [row["R_over_R_block"] for row in rows]
        ax1.plot(r, [row["kappa_over_omega"] for row in rows])
        ax1.set_ylabel(r"$\kappa/\Omega_{\rm eff}$")
        ax2.plot(r, [row["dkappa_dR"] for row in rows])
        ax2.set_ylabel(r"$\partial_R\kappa\ [\Omega_{\rm eff}/R_{\rm block}]$")
        ax2.set_xlabel(r"$R/R_{\rm block}$")
        _save(fig, path)
