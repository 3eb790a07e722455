import json
import logging

import pandas as pd
import pytest

from qmfs.core.errors import ConfigError
from qmfs.main import build_parser, main
from qmfs.numerics.chiral import WaveNumberPair
from qmfs.numerics.geometry import SurfaceGeometry, sample_surface
from qmfs.numerics.kernels import WaveNumber
from qmfs.numerics.solver import BoundaryData
from qmfs.schemas.problem import ProblemConfig, load_config, resolve_problem
from qmfs.schemas.results import CSV_COLUMNS, format_error
from qmfs.utils.pdf_report import SweepReportGenerator

SWEEP = {
    "surface": {"kind": "sphere", "radii": [1.0, 1.0, 1.0]},
    "medium": {"omega": 1.0, "epsilon": 1.0, "mu": 1.0, "beta": 0.0},
    "boundary_data": {"kind": "dipole", "c": [0.0, 0.0, 1.0], "position": [0.0, 0.0, 0.0]},
    "n_list": [3, 5, 10, 15, 20, 25, 30, 35],
    "aux_scale": 0.15,
    "evaluation": {"radius": 5.0, "count": 200},
}


def write_config(tmp_path, payload, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def sweep_csv(tmp_path):
    config = write_config(tmp_path, SWEEP)
    output = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", config, "--output", str(output)]) == 0
    return config, output


def test_sweep_writes_one_row_per_size(sweep_csv):
    _, output = sweep_csv
    frame = pd.read_csv(output)
    assert list(frame.columns) == CSV_COLUMNS
    assert frame["N"].tolist() == [3, 5, 10, 15, 20, 25, 30, 35]
    assert frame.loc[frame["N"] == 10, "errE"].item() <= 1e-2
    assert frame.loc[frame["N"] == 35, "errE"].item() <= 1e-4
    assert frame["wall_ms"].isna().all()


def test_sweep_is_reproducible(sweep_csv, tmp_path):
    config, output = sweep_csv
    rerun = tmp_path / "rerun.csv"
    assert main(["sweep", "--config", config, "--output", str(rerun)]) == 0
    assert output.read_bytes() == rerun.read_bytes()


def test_solve_writes_records_and_report(tmp_path, capsys):
    payload = dict(SWEEP, n=5, n_list=[])
    config = write_config(tmp_path, payload)
    output = tmp_path / "out" / "solve.csv"
    report = tmp_path / "solve.pdf"
    assert main(["solve", "--config", config, "--output", str(output), "--report", str(report)]) == 0

    assert len(pd.read_csv(output)) == 1
    lines = (tmp_path / "out" / "solve.csv.jsonl").read_text().splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["n"] == 5
    assert record["solver_path"] == "square"
    assert record["config"]["medium"]["beta"] == 0.0
    assert report.read_bytes().startswith(b"%PDF")
    assert "Error for E" in capsys.readouterr().out


def test_solve_needs_n(tmp_path, caplog):
    config = write_config(tmp_path, dict(SWEEP, n_list=[]))
    with caplog.at_level(logging.ERROR):
        assert main(["solve", "--config", config, "--output", str(tmp_path / "x.csv")]) == 2
    assert "ConfigError" in caplog.text


def test_chiral_singularity_exits_with_code_two(tmp_path, caplog):
    payload = dict(SWEEP, medium={"omega": 1.0, "epsilon": 1.0, "mu": 1.0, "beta": 1.0})
    config = write_config(tmp_path, payload)
    with caplog.at_level(logging.ERROR):
        assert main(["sweep", "--config", config, "--output", str(tmp_path / "x.csv")]) == 2
    assert "ChiralSingularityError" in caplog.text


def test_scale_mismatch_exits_with_code_two(tmp_path, caplog):
    config = write_config(tmp_path, dict(SWEEP, aux_scale=1.5))
    with caplog.at_level(logging.ERROR):
        assert main(["sweep", "--config", config, "--output", str(tmp_path / "x.csv")]) == 2
    assert "ScaleError" in caplog.text


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.json"))


def test_config_error_names_the_field(tmp_path):
    config = write_config(tmp_path, dict(SWEEP, evaluation={"radius": -1.0}))
    with pytest.raises(ConfigError) as excinfo:
        load_config(config)
    assert excinfo.value.field_path == "evaluation.radius"

    config = write_config(tmp_path, dict(SWEEP, bogus=1), name="extra.json")
    with pytest.raises(ConfigError) as excinfo:
        load_config(config)
    assert excinfo.value.field_path == "bogus"


def test_dipole_on_the_wrong_side_is_rejected():
    config = ProblemConfig.model_validate(
        dict(SWEEP, boundary_data={"kind": "dipole", "c": [0, 0, 1], "position": [0, 0, 2]})
    )
    with pytest.raises(ConfigError) as excinfo:
        resolve_problem(config)
    assert excinfo.value.field_path == "boundary_data.position"


def test_sizes_are_sorted_and_distinct():
    config = ProblemConfig.model_validate(dict(SWEEP, n_list=[10, 3, 10]))
    assert config.sizes() == [3, 10]
    assert ProblemConfig.model_validate({"n": 7}).sizes() == [7]
    assert ProblemConfig().sizes() == []


def test_verify_passes_by_default(tmp_path, capsys):
    config = write_config(tmp_path, {"medium": {"omega": 1.0}, "fd": {"point_count": 6}})
    assert main(["verify", "--config", config]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "cauchy" in out


def test_verify_catches_the_wrong_radiation_sign(tmp_path):
    config = write_config(tmp_path, {"checks": ["radiation"]})
    assert main(["verify", "--config", config]) == 0
    assert main(["verify", "--config", config, "--inject-wrong-sign"]) != 0


def test_verify_with_no_checks(tmp_path):
    config = write_config(tmp_path, {"checks": []})
    assert main(["verify", "--config", config]) == 0


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_format_error():
    assert format_error(0.000346) == "0.346E-03"
    assert format_error(0.0) == "0.000E+00"
    assert format_error(float("nan")) == "nan"


def write_samples(tmp_path, count):
    alpha = WaveNumber(1.0)
    nodes = sample_surface(SurfaceGeometry.sphere(1.0), count)
    values = BoundaryData.from_dipole(WaveNumberPair(alpha, alpha), (0, 0, 1)).values(nodes)
    frame = pd.DataFrame()
    for k in range(3):
        frame[f"f{k + 1}_re"] = values[:, k].real
        frame[f"f{k + 1}_im"] = values[:, k].imag
    path = tmp_path / "trace.csv"
    frame.to_csv(path, index=False)
    return str(path)


def test_samples_file_must_match_every_node_count(tmp_path, caplog):
    samples = write_samples(tmp_path, 12)
    payload = dict(SWEEP, boundary_data={"kind": "samples", "path": samples}, n_list=[5, 6])
    with pytest.raises(ConfigError) as excinfo:
        resolve_problem(ProblemConfig.model_validate(payload))
    assert excinfo.value.field_path == "boundary_data.path"

    config = write_config(tmp_path, payload)
    with caplog.at_level(logging.ERROR):
        assert main(["sweep", "--config", config, "--output", str(tmp_path / "x.csv")]) == 2
    assert "ConfigError" in caplog.text


def test_sweep_over_a_samples_file(tmp_path):
    samples = write_samples(tmp_path, 12)
    payload = dict(
        SWEEP,
        boundary_data={"kind": "samples", "path": samples},
        n_list=[2, 3],
        solver={"collocation_count": 12},
    )
    config = write_config(tmp_path, payload)
    output = tmp_path / "samples.csv"
    assert main(["sweep", "--config", config, "--output", str(output)]) == 0
    frame = pd.read_csv(output)
    assert frame["N"].tolist() == [2, 3]
    assert frame["errE"].isna().all()


def test_verify_writes_the_outcome_table(tmp_path):
    config = write_config(tmp_path, {"checks": ["kernel_annihilation", "radiation"], "fd": {"point_count": 4}})
    output = tmp_path / "checks" / "verify.csv"
    assert main(["verify", "--config", config, "--output", str(output)]) == 0
    frame = pd.read_csv(output)
    assert list(frame.columns) == ["check", "value", "tolerance", "passed"]
    assert len(frame) == 5
    assert frame["passed"].all()


def test_pdf_report_renders_the_caption_style():
    generator = SweepReportGenerator()
    assert "ReportNormal" in generator.styles
    assert generator.generate_sweep_report([]).getvalue().startswith(b"%PDF")
