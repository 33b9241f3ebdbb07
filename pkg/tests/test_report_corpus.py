import csv
import json
from fractions import Fraction
from pathlib import Path

from codesparse.cayley import sparsify_cayley
from codesparse.cli import main
from codesparse.codes import verify_sparsifier
from codesparse.corpus import (
    acceptance_code_corpus,
    hamming_7_4,
    random_code,
    simplex_cayley,
    xor2_complete,
)
from codesparse.counting import check_counting_bound
from codesparse.report import (
    write_counting_report,
    write_sparsifier_report,
    write_spectrum_report,
)
from codesparse.sparsify import final_code_sparsify


def test_counting_report_files(tmp_path):
    G = hamming_7_4()
    rep = check_counting_bound(G, 1)
    paths = write_counting_report(G, rep, tmp_path)
    assert len(paths) == 4
    for p in paths:
        assert Path(p).stat().st_size > 0
    with open(tmp_path / "counting_bound.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["observed"]) for r in rows] == [0, 0, 7, 14]
    with open(tmp_path / "counting_weights.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {int(r["weight"]): int(r["count"]) for r in rows} == {0: 1, 3: 7, 4: 7, 7: 1}


def test_sparsifier_report_files(tmp_path):
    G = random_code(2, 4, 40, 3)
    sp = final_code_sparsify(G, None, Fraction(1, 2), seed=1)
    ver = verify_sparsifier(G, None, sp, Fraction(1, 2))
    paths = write_sparsifier_report(G, None, sp, ver, tmp_path)
    assert (tmp_path / "sparsifier_coords.csv").exists()
    assert (tmp_path / "sparsifier_coords.png").stat().st_size > 0


def test_spectrum_report_files(tmp_path):
    spec = simplex_cayley(4)
    out = sparsify_cayley(spec, Fraction(1, 2), seed=2)
    paths = write_spectrum_report(spec, out, tmp_path)
    with open(tmp_path / "spectrum.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16
    assert rows[0]["eigenvalue"] == "0/1"
    assert (tmp_path / "spectrum.png").stat().st_size > 0


def test_report_cli_renders_figures(tmp_path, capsys):
    code_file = tmp_path / "h.code"
    from codesparse.formats import render_code

    code_file.write_text(render_code(hamming_7_4()))
    outdir = tmp_path / "figs"
    assert main([
        "report", "--code", str(code_file), "--d", "1",
        "--epsilon", "1/2", "--seed", "3", "--outdir", str(outdir),
    ]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert len(obj["files"]) == 6
    for f in obj["files"]:
        assert Path(f).exists()


def test_corpus_determinism():
    a = acceptance_code_corpus()
    b = acceptance_code_corpus()
    assert len(a) >= 200
    assert all(x[0] == y[0] and x[1] == y[1] for x, y in zip(a, b))
    qs = {G.p for _, G in a}
    assert qs == {2, 3, 5}
    assert all(G.k <= 5 and G.n <= 18 for _, G in a)


def test_xor2_complete_count():
    assert xor2_complete(8).m == 28
