import numpy as np
import pytest
import yaml

from ridgelet_prior.cli import extrapolation_grid, main, run_experiment
from ridgelet_prior.config import ConfigError, config_from_mapping, load_config
from ridgelet_prior.datasets import (
    EmptyDatasetError,
    MissingColumnError,
    NonNumericError,
    ZeroVarianceError,
    load_csv,
    synthetic_image,
    synthetic_series,
)
from ridgelet_prior.output import emit_plot_data, read_plot_data

# preset, S, D per axis, d, sigma_w, sigma_b, mollified
TABLE = [
    ("prior-1d", 6.0, 200, 1, 5.0, 36.0, True),
    ("co2", 5.0, 200, 1, 5.0, 36.0, False),
    ("airline", 5.0, 200, 1, 5.0, 36.0, False),
    ("inpainting", 5.0, 30, 2, 2.0, 18.0, False),
    ("deep", 6.0, 200, 1, 2.0, 9.0, True),
]


@pytest.mark.parametrize("preset,S,D,d,sw,sb,mollified", TABLE)
def test_preset_rows(preset, S, D, d, sw, sb, mollified):
    cfg = config_from_mapping({"preset": preset})
    assert (cfg.S, cfg.D, cfg.d, cfg.sigma_w, cfg.sigma_b) == (S, D, d, sw, sb)
    rule = cfg.input_rule()
    assert rule.D == D**d and rule.nodes.min() == -S
    u = (2 * S) ** d / D**d
    if mollified:
        assert rule.mollifier is not None
        inside = np.all(np.abs(rule.nodes) <= 5.0, axis=1)
        assert np.allclose(rule.weights[inside], u) and np.all(rule.weights <= u)
    else:
        assert rule.mollifier is None and np.allclose(rule.weights, u)


def test_defaults_and_overrides():
    cfg = config_from_mapping({})
    assert cfg.experiment == "sample-prior" and cfg.N == [100, 1000, 3000]
    assert cfg.kernel == "se" and cfg.lengthscale == 1.5 and cfg.amplitude == 1.0
    assert cfg.sigma_w0 == 5.0 and cfg.sigma_b0 == 36.0 and cfg.sigma_w1 is None
    assert cfg.schedule[0] == [1.0, 4.0, 300] and cfg.schedule[-1] == [5.0, 36.0, 30000]
    assert cfg.bandwidths == [[1.0, 4.0], [2.0, 9.0], [3.0, 16.0], [4.0, 25.0]]
    assert (cfg.n_samples - cfg.burn_in) // cfg.thin == 2000
    co2 = config_from_mapping({"preset": "co2", "noise_sd": 0.2})
    assert co2.noise_sd == 0.2 and co2.period == 1.8 and co2.mean_slope == 0.06


@pytest.mark.parametrize(
    "mapping",
    [
        {"bogus": 1},
        {"kernel": "matern"},
        {"D": 0},
        {"N": []},
        {"sigma_w": "five"},
        {"preset": "co2", "d": 2},
        {"burn_in": 5000},
        {"S": 4.0},
        {"seed": 1.5},
    ],
)
def test_invalid_configs(mapping):
    with pytest.raises(ConfigError):
        config_from_mapping(mapping)


def test_load_config_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump({"preset": "co2", "N": 50}))
    cfg = load_config(p, seed=3)
    assert cfg.N == [50] and cfg.seed == 3
    (tmp_path / "bad.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_digest_tracks_content():
    a, b = config_from_mapping({}), config_from_mapping({"seed": 1})
    assert a.digest() == config_from_mapping({}).digest() != b.digest()


# -- datasets -----------------------------------------------------------------------


def _csv(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_csv_raw_roundtrip(tmp_path):
    data = load_csv(_csv(tmp_path, "x,y\n1.5,2\n-3,0.25\n"), standardize=False)
    assert np.array_equal(data.x[:, 0], [1.5, -3.0]) and np.array_equal(data.y, [2.0, 0.25])


def test_load_csv_standardizes_series(tmp_path):
    t = np.arange(43) * 0.37 + 1990.0
    y = 350 + 0.1 * np.arange(43) + np.sin(np.arange(43))
    body = "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(t, y))
    data = load_csv(_csv(tmp_path, "# comment\ntime,co2\n" + body + "\n"), ["time"], "co2")
    assert data.x.min() == -5.0 and data.x.max() == 5.0
    assert abs(data.y.mean()) <= 1e-9 and abs(data.y.std() - 1.0) <= 1e-9
    assert np.allclose(data.to_raw_x(data.x)[:, 0], t) and np.allclose(data.to_raw_y(data.y), y)


@pytest.mark.parametrize(
    "text,error",
    [
        ("x,y\n1,2\n2,2\n", ZeroVarianceError),
        ("x,z\n1,2\n", MissingColumnError),
        ("x,y\n1,abc\n", NonNumericError),
        ("", EmptyDatasetError),
        ("x,y\n", EmptyDatasetError),
    ],
)
def test_load_csv_errors(tmp_path, text, error):
    with pytest.raises(error):
        load_csv(_csv(tmp_path, text))


def test_zero_variance_message(tmp_path):
    with pytest.raises(ZeroVarianceError, match="zero variance"):
        load_csv(_csv(tmp_path, "x,y\n1,2\n2,2\n"))


def test_synthetic_generators():
    s = synthetic_series("co2", seed=0)
    assert s.n == 43 and s.x.min() == -5 and s.x.max() == 5
    assert abs(s.y.mean()) <= 1e-9 and abs(s.y.std() - 1) <= 1e-9
    assert np.array_equal(s.y, synthetic_series("co2", seed=0).y)
    with pytest.raises(ValueError):
        synthetic_series("sunspots")
    X, clean, observed, noisy = synthetic_image(10, 1.5, 0.1, seed=0)
    assert X.shape == (100, 2) and 0 < observed.sum() < 100
    assert not np.any(observed[np.max(np.abs(X), axis=1) < 1.5])


def test_extrapolation_grid():
    g = extrapolation_grid(43, 0.55)
    assert g.size == 23
    assert np.allclose(np.diff(g), 10 / 42) and g[0] == pytest.approx(5 + 10 / 42)


# -- plot data ------------------------------------------------------------------------


def test_emit_empty_is_header_only(tmp_path):
    p = emit_plot_data([], ["a", "b"], tmp_path / "e.csv")
    assert p.read_text() == "a,b\n"


def test_emit_roundtrip(tmp_path):
    recs = [{"k": "gp", "n": 3, "v": 0.1 + 0.2}, {"k": "iid", "n": -1, "v": -1e-300}]
    p = emit_plot_data(recs, ["k", "n", "v"], tmp_path / "r.csv", {"seed": 7})
    meta, schema, back = read_plot_data(p)
    assert meta == {"seed": "7"} and schema == ["k", "n", "v"] and back == recs


def test_emit_errors(tmp_path):
    with pytest.raises(OSError):
        emit_plot_data([[1]], ["a"], tmp_path / "missing" / "x.csv")
    with pytest.raises(ValueError):
        emit_plot_data([[1, 2]], ["a"], tmp_path / "x.csv")


# -- experiments --------------------------------------------------------------------


def _write_cfg(tmp_path, **kw):
    p = tmp_path / "cfg.yaml"
    p.write_text(yaml.safe_dump(kw))
    return p


def test_sample_prior_files(tmp_path):
    cfg = _write_cfg(tmp_path, prior="ridgelet", probe_points=21, D=60)
    out = tmp_path / "out"
    assert main(["sample-prior", "--config", str(cfg), "--out", str(out), "--seed", "4"]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == ["gp_paths.csv", *(f"prior_paths_ridgelet_N{N}.csv" for N in (100, 1000, 3000))]
    meta, schema, recs = read_plot_data(out / "prior_paths_ridgelet_N100.csv")
    assert schema == ["x"] + [f"path_{k}" for k in range(10)] and len(recs) == 21
    assert meta["seed"] == "4" and len(meta["config_hash"]) == 64
    assert {"ridgelet_prior", "numpy", "scipy"} <= set(meta)


def test_reruns_are_byte_identical(tmp_path):
    cfg = config_from_mapping({"experiment": "sample-prior", "N": [20], "probe_points": 11, "D": 40, "n_paths": 3})
    a = run_experiment(cfg, tmp_path / "a")
    b = run_experiment(cfg, tmp_path / "b")
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]


def test_sweep_outputs(tmp_path):
    cfg = config_from_mapping({"experiment": "sweep", "N": [30], "seeds": [0], "D": 40, "probe_points": 11,
                               "n_nets": 3})
    paths = run_experiment(cfg, tmp_path)
    assert [p.name for p in paths] == ["sweep_mrmse.csv", "sweep_cov.csv"]
    _, _, recs = read_plot_data(paths[0])
    assert [(r["sigma_w"], r["sigma_b"]) for r in recs] == [(1.0, 4.0), (2.0, 9.0), (3.0, 16.0), (4.0, 25.0)]


def test_mrmse_and_reconstruct(tmp_path):
    cfg = config_from_mapping({"experiment": "mrmse", "N": [20, 40], "seeds": [0, 1], "D": 40, "probe_points": 11})
    _, _, summ = read_plot_data(run_experiment(cfg, tmp_path)[1])
    assert [r["N"] for r in summ] == [20, 40]
    rec = config_from_mapping({"experiment": "reconstruct", "schedule": [[1.0, 4.0, 50, 40]], "seeds": [0],
                               "probe_points": 11})
    _, schema, rows = read_plot_data(run_experiment(rec, tmp_path)[1])
    assert schema[-1] == "median_sup_error" and rows[0]["D"] == 40


def test_cov_curve(tmp_path):
    cfg = config_from_mapping({"experiment": "cov-curve", "N": [20], "seeds": [0], "D": 40, "probe_points": 11,
                               "n_nets": 3})
    _, _, recs = read_plot_data(run_experiment(cfg, tmp_path)[0])
    assert {r["prior"] for r in recs} == {"ridgelet", "iid"} and len(recs) == 22


def test_regress_small(tmp_path):
    cfg = config_from_mapping({"experiment": "regress", "preset": "co2", "N": [10], "D": 30, "n_samples": 6,
                               "burn_in": 2, "thin": 2})
    paths = run_experiment(cfg, tmp_path)
    _, _, recs = read_plot_data(tmp_path / "predictive.csv")
    assert {r["model"] for r in recs} == {"gp", "ridgelet", "iid"}
    assert sum(r["model"] == "gp" for r in recs) == 43 + 23
    assert all(r["lo"] <= r["mean"] <= r["hi"] for r in recs if r["model"] == "gp")
    assert len(paths) == 3


def test_regress_from_csv(tmp_path):
    s = synthetic_series("airline", seed=1)
    body = "\n".join(f"{i},{float(v)!r}" for i, v in enumerate(s.y))
    csv = _csv(tmp_path, "month,passengers\n" + body + "\n")
    cfg = config_from_mapping({"experiment": "regress", "preset": "airline", "dataset": str(csv),
                               "x_columns": ["month"], "y_column": "passengers", "prior": "iid", "N": [5],
                               "n_samples": 2, "burn_in": 0, "thin": 1})
    run_experiment(cfg, tmp_path)
    _, _, recs = read_plot_data(tmp_path / "predictive.csv")
    assert {r["model"] for r in recs} == {"gp", "iid"}


def test_inpaint_small(tmp_path):
    cfg = config_from_mapping({"experiment": "inpaint", "preset": "inpainting", "image_size": 8, "D": 8,
                               "N": [20], "n_samples": 4, "burn_in": 2, "thin": 1})
    run_experiment(cfg, tmp_path)
    _, schema, recs = read_plot_data(tmp_path / "inpaint.csv")
    assert schema == ["model", "N", "x1", "x2", "mean", "observed"]
    assert {r["model"] for r in recs} == {"truth", "gp", "ridgelet", "iid"}
    assert sum(r["model"] == "ridgelet" for r in recs) == 64


def test_exit_codes(tmp_path, capsys):
    assert main(["mrmse", "--config", str(_write_cfg(tmp_path, bogus=1)), "--out", str(tmp_path)]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert main(["regress", "--out", str(tmp_path)]) == 2
    assert "dataset" in capsys.readouterr().err
    missing = _write_cfg(tmp_path, preset="co2", dataset=str(tmp_path / "nope.csv"))
    assert main(["regress", "--config", str(missing), "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit):
        main(["not-an-experiment"])
