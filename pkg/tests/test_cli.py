"""Command-line behavior: happy paths, exit codes, stream plumbing."""

import io
import json

import pytest

from somaction.cli import main

TINY_CONFIG = """\
[generator]
samples_per_action = 2
seed = 7

[pipeline]
seed = 11

[pipeline.layer1]
rows = 10
cols = 10
epochs = 40

[pipeline.layer2]
rows = 12
cols = 12
epochs = 40

[pipeline.supervised]
epochs = 120
"""


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Config, generated stream + manifest, and a trained model on disk."""
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "tiny.toml"
    cfg.write_text(TINY_CONFIG)
    stream = root / "stream.jsonl"
    manifest = root / "manifest.jsonl"
    model = root / "model.json"
    assert main(
        ["--config", str(cfg), "generate", "--out", str(stream), "--manifest", str(manifest)]
    ) == 0
    assert main(
        ["--config", str(cfg), "train", "--stream", str(stream), "--model", str(model)]
    ) == 0
    return {"cfg": cfg, "stream": stream, "manifest": manifest, "model": model, "root": root}


def test_generate_writes_stream_and_manifest(workdir):
    lines = workdir["stream"].read_text().splitlines()
    assert lines and all(json.loads(line)["kind"] for line in lines)
    entries = workdir["manifest"].read_text().splitlines()
    assert len(entries) == 10
    assert json.loads(entries[0])["index"] == 0


def test_generate_to_stdout(capsys, workdir):
    assert main(["--config", str(workdir["cfg"]), "generate"]) == 0
    out = capsys.readouterr()
    lines = out.out.strip().splitlines()
    assert lines == workdir["stream"].read_text().splitlines()
    assert "records" in out.err


def test_seed_flag_changes_output(capsys, workdir):
    cfg = str(workdir["cfg"])
    assert main(["--config", cfg, "--seed", "1", "generate"]) == 0
    first = capsys.readouterr().out
    assert main(["--config", cfg, "--seed", "2", "generate"]) == 0
    second = capsys.readouterr().out
    assert main(["--config", cfg, "--seed", "1", "generate"]) == 0
    again = capsys.readouterr().out
    assert first != second
    assert first == again


def test_train_reports_table(capsys, workdir, tmp_path):
    model = tmp_path / "m.json"
    rc = main(
        [
            "--config",
            str(workdir["cfg"]),
            "train",
            "--stream",
            str(workdir["stream"]),
            "--model",
            str(model),
        ]
    )
    out = capsys.readouterr()
    assert rc == 0
    assert model.exists()
    assert "training accuracy:" in out.out
    assert out.out.splitlines()[0].split() == ["action", "samples", "recognized"]


def test_evaluate_prints_table(capsys, workdir):
    rc = main(
        [
            "evaluate",
            "--model",
            str(workdir["model"]),
            "--stream",
            str(workdir["stream"]),
            "--manifest",
            str(workdir["manifest"]),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "confusion" in out and "objects:" in out


def test_evaluate_json(capsys, workdir):
    rc = main(
        [
            "evaluate",
            "--model",
            str(workdir["model"]),
            "--stream",
            str(workdir["stream"]),
            "--manifest",
            str(workdir["manifest"]),
            "--json",
        ]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"labels", "per_action", "total", "objects", "confusion", "latency_ms"}
    assert doc["total"]["tested"] == 10


def test_run_emits_verdict_lines(capsys, workdir):
    rc = main(["run", "--model", str(workdir["model"]), "--stream", str(workdir["stream"])])
    out = capsys.readouterr()
    assert rc == 0
    lines = out.out.strip().splitlines()
    assert len(lines) == 10
    keys = {"label", "activations", "object_id", "object_scores", "t_start", "t_end", "latency_ms"}
    for line in lines:
        doc = json.loads(line)
        assert set(doc) == keys
        assert doc["latency_ms"] > 0.0
    assert "10 verdicts" in out.err


def test_run_reads_stdin(capsys, monkeypatch, workdir):
    monkeypatch.setattr("sys.stdin", io.StringIO(workdir["stream"].read_text()))
    rc = main(["run", "--model", str(workdir["model"])])
    out = capsys.readouterr()
    assert rc == 0
    assert len(out.out.strip().splitlines()) == 10


def test_inspect_describes_model(capsys, workdir):
    rc = main(["inspect", "--model", str(workdir["model"])])
    out = capsys.readouterr().out
    assert rc == 0
    assert "labels: push pull put lift point" in out
    assert "layer1 (10x10)" in out
    assert "layer2 (12x12)" in out
    assert "ordered-vector dim" in out


def test_inspect_stream_windows(capsys, workdir):
    rc = main(
        [
            "inspect",
            "--model",
            str(workdir["model"]),
            "--stream",
            str(workdir["stream"]),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    window_lines = [line for line in out.splitlines() if line.startswith("window ")]
    assert len(window_lines) == 10
    assert "trace points" in window_lines[0]


def test_usage_errors_exit_1(workdir):
    for argv in (
        [],
        ["no-such-command"],
        ["train", "--stream", str(workdir["stream"])],
        ["run"],
        ["--seed", "not-a-number", "generate"],
    ):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 1


def test_help_exits_0():
    with pytest.raises(SystemExit) as err:
        main(["--help"])
    assert err.value.code == 0


def test_missing_files_exit_2(capsys, workdir, tmp_path):
    missing = str(tmp_path / "nope")
    assert main(["run", "--model", missing, "--stream", str(workdir["stream"])]) == 2
    assert main(["train", "--stream", missing, "--model", str(tmp_path / "m.json")]) == 2
    assert (
        main(
            [
                "evaluate",
                "--model",
                str(workdir["model"]),
                "--stream",
                str(workdir["stream"]),
                "--manifest",
                missing,
            ]
        )
        == 2
    )
    assert "error:" in capsys.readouterr().err


def test_corrupt_model_exits_2(capsys, workdir, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--model", str(bad), "--stream", str(workdir["stream"])]) == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text('{"format_version": 42}')
    assert main(["run", "--model", str(wrong), "--stream", str(workdir["stream"])]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[generator]\nsamples_per_action = -3\n")
    assert main(["--config", str(cfg), "generate"]) == 2
    assert "error:" in capsys.readouterr().err


def test_manifest_mismatch_exits_2(capsys, workdir, tmp_path):
    truncated = tmp_path / "short.jsonl"
    lines = workdir["manifest"].read_text().splitlines()[:-1]
    truncated.write_text("\n".join(lines) + "\n")
    rc = main(
        [
            "evaluate",
            "--model",
            str(workdir["model"]),
            "--stream",
            str(workdir["stream"]),
            "--manifest",
            str(truncated),
        ]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err
