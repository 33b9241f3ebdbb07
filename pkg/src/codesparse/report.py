"""Report rendering: CSV summaries with matplotlib figures next to them.

Each writer returns the list of file paths it produced.  Figures are
display artifacts; every machine-readable number in the CSVs is exact
(rationals as num/den plus a float column for convenience).
"""

from __future__ import annotations

import csv
from collections import Counter
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .cayley import CayleySpec, laplacian_spectrum
from .codes import GeneratorMatrix, Sparsifier, VerificationReport
from .counting import CountingBoundReport, codeword_weight_array
from .formats import fraction_to_str


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def write_counting_report(
    G: GeneratorMatrix,
    report: CountingBoundReport,
    outdir: str | Path,
    stem: str = "counting",
) -> list[Path]:
    """Per-alpha observed counts versus the bound, as CSV and a log-scale
    bar chart, plus the brute-force codeword weight histogram."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    csv_path = outdir / f"{stem}_bound.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "observed", "bound", "ok"])
        for line in report.per_alpha:
            writer.writerow([line.alpha, line.observed, line.bound, int(line.ok)])
    paths.append(csv_path)

    alphas = [line.alpha for line in report.per_alpha]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(
        [a - 0.2 for a in alphas],
        [max(line.observed, 0.5) for line in report.per_alpha],
        width=0.4,
        label="observed",
    )
    ax.bar(
        [a + 0.2 for a in alphas],
        [line.bound for line in report.per_alpha],
        width=0.4,
        label="bound",
    )
    ax.set_yscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("codewords of weight <= alpha d")
    ax.set_title(f"counting bound at d = {report.d}")
    ax.legend()
    fig_path = outdir / f"{stem}_bound.png"
    _save(fig, fig_path)
    paths.append(fig_path)

    weights = codeword_weight_array(G)
    hist = Counter(int(w) for w in weights)
    csv_hist = outdir / f"{stem}_weights.csv"
    with open(csv_hist, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["weight", "count"])
        for w in sorted(hist):
            writer.writerow([w, hist[w]])
    paths.append(csv_hist)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(sorted(hist), [hist[w] for w in sorted(hist)], width=0.8)
    ax.set_xlabel("codeword weight")
    ax.set_ylabel("count")
    ax.set_title("codeword weight distribution")
    hist_path = outdir / f"{stem}_weights.png"
    _save(fig, hist_path)
    paths.append(hist_path)
    return paths


def write_sparsifier_report(
    G: GeneratorMatrix,
    base_weights,
    sp: Sparsifier,
    verification: VerificationReport,
    outdir: str | Path,
    stem: str = "sparsifier",
) -> list[Path]:
    """Retained coordinates with weights (CSV) and a weight profile figure
    annotated with the verification outcome."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    csv_path = outdir / f"{stem}_coords.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["coordinate", "weight", "weight_float"])
        for c, w in zip(sp.coords, sp.weights):
            writer.writerow([c, fraction_to_str(w), float(w)])
    paths.append(csv_path)

    fig, ax = plt.subplots(figsize=(6, 4))
    if sp.coords:
        ax.scatter(sp.coords, [float(w) for w in sp.weights], s=12)
        ax.set_yscale("log")
    ax.set_xlabel("retained coordinate")
    ax.set_ylabel("weight")
    verdict = "pass" if verification.passed else "FAIL"
    ax.set_title(
        f"{len(sp)}/{G.n} coordinates, eps={verification.epsilon}, "
        f"max err={float(verification.max_relative_error):.4g} ({verdict})"
    )
    fig_path = outdir / f"{stem}_coords.png"
    _save(fig, fig_path)
    paths.append(fig_path)
    return paths


def write_spectrum_report(
    original: CayleySpec,
    sparsified: CayleySpec | None,
    outdir: str | Path,
    stem: str = "spectrum",
) -> list[Path]:
    """Laplacian spectra (exact rationals in CSV, sorted profile figure);
    with a sparsified spec, both spectra are overlaid."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    lam = laplacian_spectrum(original)
    lam_hat = laplacian_spectrum(sparsified) if sparsified is not None else None

    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["x", "eigenvalue", "eigenvalue_float"]
        if lam_hat is not None:
            header += ["sparsified", "sparsified_float"]
        writer.writerow(header)
        for x, value in enumerate(lam):
            row = [x, fraction_to_str(value), float(value)]
            if lam_hat is not None:
                row += [fraction_to_str(lam_hat[x]), float(lam_hat[x])]
            writer.writerow(row)
    paths.append(csv_path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sorted(float(v) for v in lam), label="original", drawstyle="steps-post")
    if lam_hat is not None:
        ax.plot(
            sorted(float(v) for v in lam_hat),
            label="sparsified",
            drawstyle="steps-post",
            linestyle="--",
        )
    ax.set_xlabel("eigenvalue index (sorted)")
    ax.set_ylabel("Laplacian eigenvalue")
    ax.set_title(f"Cayley spectrum, k={original.k}")
    ax.legend()
    fig_path = outdir / f"{stem}.png"
    _save(fig, fig_path)
    paths.append(fig_path)
    return paths
