#!/usr/bin/env python3
"""Plot CSV outputs of the ptomit CLI. The job kind is read from the run manifest."""

import argparse
import json
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load(path):
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    manifest = json.loads(pathlib.Path(str(path) + ".manifest.json").read_text())
    return data, manifest


def plot_spectrum(d, ax):
    ax.plot(d["omega_over_omega_m"], d["abs_tp"])
    ax.set_xlabel(r"$\omega/\omega_m$")
    ax.set_ylabel(r"$|t_p|$")
    tw = ax.twinx()
    tw.plot(d["omega_over_omega_m"], d["tau_g_s"] * 1e6, color="tab:red", lw=0.8)
    tw.set_ylabel(r"$\tau_g$ ($\mu$s)")


def plot_stability(d, ax):
    g2 = np.unique(d["g2_mag_over_g1"])
    phi = np.unique(d["phi2_rad"])
    stable = (d["status"] == "stable").reshape(len(g2), len(phi))
    ax.pcolormesh(phi, g2, stable, shading="nearest", cmap="Greys")
    ax.set_xlabel(r"$\phi_2$ (rad)")
    ax.set_ylabel(r"$|g_2|/g_1$")


def plot_loci(d, ax):
    for k in (0, 1):
        sel = d["track"] == k
        ax.plot(d["re_over_gamma_span"][sel], d["im_over_omega_m"][sel], ".-", ms=2, label=f"track {k}")
    ax.set_xlabel(r"Re $\lambda/(\gamma_1-\gamma_2)$")
    ax.set_ylabel(r"Im $\lambda/\omega_m$")
    ax.legend()


def plot_map2d(d, ax):
    mu = np.unique(d["mu_over_gamma_span"])
    w = np.unique(d["omega_over_omega_m"])
    z = d["abs_tp"].reshape(len(mu), len(w))
    m = ax.pcolormesh(w, mu, z, shading="nearest")
    plt.colorbar(m, ax=ax, label=r"$|t_p|$")
    ax.set_xlabel(r"$\omega/\omega_m$")
    ax.set_ylabel(r"$|\mu|/(\gamma_1-\gamma_2)$")


def plot_bandwidth(d, ax):
    for band in np.unique(d["band"]):
        sel = d["band"] == band
        ax.plot(d["phi2_rad"][sel], d["product"][sel], ".-", label=band)
    first = np.unique(d["phi2_rad"], return_index=True)[1]
    ax.plot(d["phi2_rad"][first], d["total_product"][first], "k-", label="total")
    ax.set_xlabel(r"$\phi_2$ (rad)")
    ax.set_ylabel("peak x HWHM")
    ax.legend()


PLOTTERS = {
    "spectrum": plot_spectrum,
    "stability-map": plot_stability,
    "root-loci": plot_loci,
    "map2d": plot_map2d,
    "gain-bw": plot_bandwidth,
    "delay-bw": plot_bandwidth,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", type=pathlib.Path)
    args = ap.parse_args()
    for path in args.csv:
        data, manifest = load(path)
        job = manifest["job"]
        if job not in PLOTTERS:
            print(f"skipping {path}: no plot for job '{job}'")
            continue
        fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
        PLOTTERS[job](data, ax)
        ax.set_title(path.stem)
        out = path.with_suffix(".png")
        fig.savefig(out, dpi=150)
        plt.close(fig)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
