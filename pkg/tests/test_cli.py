import subprocess
import sys

from ltcnd import CompressionStats, parse_stream
from ltcnd.cli import main


def generate(tmp_path, name="in.csv", **kw):
    path = tmp_path / name
    args = ["--mode", "generate", "--output", str(path)]
    for key, value in kw.items():
        args += [f"--{key}", str(value)]
    assert main(args) == 0
    return path


def test_generate_deterministic(tmp_path):
    a = generate(tmp_path, "a.csv", kind="random_walk", n=3, length=1000, seed=7)
    b = generate(tmp_path, "b.csv", kind="random_walk", n=3, length=1000, seed=7)
    assert a.read_bytes() == b.read_bytes()


def test_roundtrip_euclidean_bound(tmp_path):
    src = generate(tmp_path, kind="random_walk", n=3, length=500, seed=1)
    stats = tmp_path / "stats.txt"
    code = main(["--mode", "roundtrip", "--input", str(src), "--epsilon", "0.5", "--norm", "euclidean",
                 "--output", str(tmp_path / "tx.csv"), "--recon-output", str(tmp_path / "rec.csv"),
                 "--stats-output", str(stats)])
    assert code == 0
    result = CompressionStats.from_kv(stats.read_text())
    assert result.max_error <= 0.5
    assert result.n_received == 500 and result.peak_ball_set >= 1
    assert len(parse_stream(tmp_path / "rec.csv")) == 500


def test_dims_selection(tmp_path):
    src = generate(tmp_path, kind="sinusoid", n=3, length=200, seed=2)
    out = tmp_path / "tx.csv"
    assert main(["--mode", "compress", "--input", str(src), "--dims", "x,y", "--epsilon", "0.1",
                 "--output", str(out)]) == 0
    tx = parse_stream(out)
    assert tx.header == ["t", "x", "y"] and tx.n == 2


def test_compress_then_reconstruct(tmp_path):
    src = generate(tmp_path, kind="random_walk", n=2, length=300, seed=3)
    tx, rec = tmp_path / "tx.csv", tmp_path / "rec.csv"
    assert main(["--mode", "compress", "--input", str(src), "--epsilon", "0.2", "--output", str(tx)]) == 0
    assert main(["--mode", "reconstruct", "--input", str(tx), "--reference", str(src),
                 "--output", str(rec)]) == 0
    original, back = parse_stream(src), parse_stream(rec)
    assert abs(original.values - back.values).max() <= 0.2 + 1e-12


def test_stats_json(tmp_path, capsys):
    src = generate(tmp_path, kind="uniform", n=2, length=100, seed=4)
    assert main(["--mode", "stats", "--input", str(src), "--epsilon", "0.3", "--stats-format", "json"]) == 0
    assert '"ratio_pct"' in capsys.readouterr().out


def test_deterministic_outputs(tmp_path):
    src = generate(tmp_path, kind="random_walk", n=3, length=400, seed=5)
    outs = []
    for name in ("one.csv", "two.csv"):
        out = tmp_path / name
        main(["--mode", "compress", "--input", str(src), "--epsilon", "0.4", "--norm", "euclidean",
              "--output", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_verify(capsys):
    assert main(["--mode", "verify", "--cases", "20", "--epsilon", "0.5", "--seed", "1"]) == 0
    text = capsys.readouterr().out
    assert "disagree=0" in text


def test_input_errors_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n0,2\n", encoding="utf-8")
    assert main(["--mode", "compress", "--input", str(bad)]) == 1
    assert main(["--mode", "compress", "--input", str(tmp_path / "missing.csv")]) == 1
    good = generate(tmp_path, kind="constant", n=2, length=10)
    assert main(["--mode", "compress", "--input", str(good), "--epsilon", "-1"]) == 1
    assert main(["--mode", "compress", "--input", str(good), "--backend", "ltc1d"]) == 1


def test_console_entry_point(tmp_path):
    src = generate(tmp_path, kind="constant", n=1, length=10)
    proc = subprocess.run([sys.executable, "-m", "ltcnd", "--mode", "stats", "--input", str(src)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "n_transmitted=2" in proc.stdout
