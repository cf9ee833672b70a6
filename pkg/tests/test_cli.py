"""Tests for the command line, the artifacts and the exit codes"""

import json
import os

import pandas as pd
import pytest

from custom_exceptions import (
    ContractViolationException,
    FileFormatException,
    NumericalException,
    UsageException,
)
from local_environment import EnvironmentManager
from main import main, parse_and_validate
from manager import derived_path
from utils.basic import map_exception
from utils.files import read_fit, read_json, read_qmatrix, read_responses, write_fit


def write_q(q, path):
    frame = pd.DataFrame(q.entries, columns=list(q.attribute_ids))
    frame.insert(0, "item", list(q.item_ids))
    frame.to_csv(path, index=False, lineterminator="\n")


def write_responses(data, path):
    frame = pd.DataFrame(data.values, columns=list(data.item_ids))
    frame.insert(0, "examinee_id", list(data.examinee_ids))
    frame.to_csv(path, index=False, lineterminator="\n")


@pytest.fixture(name="inputs")
def fixture_inputs(tmp_path, small_design, small_data):
    """Q-matrix and responses written to a temporary directory"""
    q_path = str(tmp_path / "q.csv")
    responses_path = str(tmp_path / "responses.csv")
    write_q(small_design.q_matrix(), q_path)
    write_responses(small_data, responses_path)
    return tmp_path, q_path, responses_path


@pytest.fixture(name="fitted")
def fixture_fitted(inputs):
    """fit.json of the full LCDM"""
    tmp_path, q_path, responses_path = inputs
    fit_path = str(tmp_path / "fit.json")
    code = main(
        ["fit", "--responses", responses_path, "--qmatrix", q_path, "--model", "lcdm", "--out", fit_path]
    )
    assert code == 0
    return tmp_path, q_path, responses_path, fit_path


class TestParse:
    """Tests for parse_and_validate."""

    def test_fit_config(self, inputs):
        """Test a fit command line becomes a RunConfig."""
        tmp_path, q_path, responses_path = inputs

        config = parse_and_validate(
            [
                "--threads",
                "3",
                "fit",
                "--responses",
                responses_path,
                "--qmatrix",
                q_path,
                "--model",
                "dina",
                "--structural-order",
                "2",
                "--out",
                str(tmp_path / "fit.json"),
            ]
        )

        assert config.subcommand == "fit"
        assert config.threads == 3
        assert config.model == "dina"
        assert config.structural_order == 2

    def test_semantic_dict_ignores_outputs(self, inputs):
        """Test threads and output paths do not enter the hash input."""
        tmp_path, q_path, responses_path = inputs
        argv = ["fit", "--responses", responses_path, "--qmatrix", q_path, "--model", "lcdm"]

        first = parse_and_validate(["--threads", "1"] + argv + ["--out", str(tmp_path / "a.json")])
        second = parse_and_validate(["--threads", "2"] + argv + ["--out", str(tmp_path / "b.json")])

        assert first.semantic_dict() == second.semantic_dict()

    def test_mask_with_lcdm(self, inputs):
        """Test --mask is refused for built-in templates."""
        tmp_path, q_path, responses_path = inputs
        mask_path = tmp_path / "mask.json"
        mask_path.write_text("{}")

        with pytest.raises(UsageException) as exc_info:
            parse_and_validate(
                [
                    "fit",
                    "--responses",
                    responses_path,
                    "--qmatrix",
                    q_path,
                    "--model",
                    "lcdm",
                    "--mask",
                    str(mask_path),
                    "--out",
                    str(tmp_path / "fit.json"),
                ]
            )
        assert exc_info.value.flag == "--mask"

    def test_structural_order_above_attributes(self, inputs):
        """Test the structural order is bounded by A."""
        tmp_path, q_path, responses_path = inputs

        with pytest.raises(UsageException, match="structural-order"):
            parse_and_validate(
                [
                    "fit",
                    "--responses",
                    responses_path,
                    "--qmatrix",
                    q_path,
                    "--model",
                    "lcdm",
                    "--structural-order",
                    "4",
                    "--out",
                    str(tmp_path / "fit.json"),
                ]
            )

    def test_bad_alphas(self, tmp_path):
        """Test the alpha list is validated."""
        with pytest.raises(UsageException):
            parse_and_validate(
                ["simulate", "--study", "type1-q", "--alphas", "0.05,0.7", "--out", str(tmp_path / "s.csv")]
            )

    def test_help(self):
        """Test help yields no configuration."""
        assert parse_and_validate(["--help"]) is None


class TestExitCodes:
    """Tests for exit codes of main."""

    def test_missing_required_flag(self, inputs):
        """Test mi without --fit is a usage error."""
        tmp_path, _, responses_path = inputs

        assert main(["mi", "--responses", responses_path, "--out", str(tmp_path / "mi.json")]) == 2

    def test_unknown_subcommand(self):
        """Test an unknown subcommand is a usage error."""
        assert main(["estimate"]) == 2

    def test_help(self):
        """Test help exits cleanly."""
        assert main(["--help"]) == 0

    def test_empty_qmatrix(self, inputs):
        """Test a Q-matrix without item rows is a format error."""
        tmp_path, _, responses_path = inputs
        q_path = tmp_path / "empty_q.csv"
        q_path.write_text("item,A1,A2,A3\n")

        code = main(
            [
                "fit",
                "--responses",
                responses_path,
                "--qmatrix",
                str(q_path),
                "--model",
                "lcdm",
                "--out",
                str(tmp_path / "fit.json"),
            ]
        )

        assert code == 3

    def test_zero_qmatrix_row(self, inputs, caplog):
        """Test an item measuring nothing is a format error naming it."""
        tmp_path, _, responses_path = inputs
        q_path = tmp_path / "zero_q.csv"
        q_path.write_text("item,A1,A2\nI1,1,0\nI2,0,0\n")

        code = main(
            [
                "fit",
                "--responses",
                responses_path,
                "--qmatrix",
                str(q_path),
                "--model",
                "lcdm",
                "--out",
                str(tmp_path / "fit.json"),
            ]
        )

        assert code == 3
        assert "I2" in caplog.text

    def test_missing_response(self, inputs):
        """Test a blank response cell is a format error."""
        tmp_path, q_path, responses_path = inputs
        lines = open(responses_path, encoding="utf8").read().splitlines()
        cells = lines[1].split(",")
        cells[1] = ""
        lines[1] = ",".join(cells)
        broken = tmp_path / "broken.csv"
        broken.write_text("\n".join(lines) + "\n")

        code = main(
            [
                "fit",
                "--responses",
                str(broken),
                "--qmatrix",
                q_path,
                "--model",
                "lcdm",
                "--out",
                str(tmp_path / "fit.json"),
            ]
        )

        assert code == 3

    @pytest.mark.parametrize(
        "exception, status",
        [
            (UsageException("x"), "USAGE"),
            (FileFormatException("x"), "FORMAT"),
            (NumericalException("x"), "NUMERICAL"),
            (ContractViolationException("x"), "NUMERICAL"),
            (FileNotFoundError("x"), "FORMAT"),
            (RuntimeError("x"), "NUMERICAL"),
        ],
    )
    def test_exception_mapping(self, exception, status):
        """Test exceptions map to exit statuses."""
        assert map_exception(exception) == status


class TestEndToEnd:
    """Tests running every subcommand through main."""

    def test_fit_artifact(self, fitted, small_data):
        """Test fit.json reloads with the same log-likelihood."""
        _, _, responses_path, fit_path = fitted
        payload = read_json(fit_path)

        reloaded = read_fit(fit_path, read_responses(responses_path))

        assert payload["convergence"]["converged"]
        assert len(payload["config_hash"]) == 64
        assert reloaded.loglik == pytest.approx(payload["loglik"], abs=1e-9)
        assert reloaded.spec.q.item_ids == small_data.item_ids

    def test_write_fit_rescores(self, tmp_path, small_fit, small_data):
        """Test fit.json stores no posteriors and reloads to the same fit."""
        path = str(tmp_path / "direct.json")

        write_fit(path, small_fit)

        payload = read_json(path)
        assert "posteriors" not in payload
        reloaded = read_fit(path, small_data)
        assert reloaded.loglik == pytest.approx(small_fit.loglik, abs=1e-9)
        assert reloaded.iterations == small_fit.iterations
        assert reloaded.converged == small_fit.converged

    def test_mi(self, fitted):
        """Test mi writes JSON and the table beside it."""
        tmp_path, _, responses_path, fit_path = fitted
        out = str(tmp_path / "mi.json")

        code = main(
            [
                "mi",
                "--fit",
                fit_path,
                "--responses",
                responses_path,
                "--m-override",
                "148",
                "--out",
                out,
            ]
        )

        assert code == 0
        payload = read_json(out)
        assert payload["m"] == 148
        table = open(derived_path(out, ".txt"), encoding="utf8").read()
        assert "critical value = 11.55" in table.splitlines()[0]

    def test_mi_threads_identical(self, fitted):
        """Test mi output does not depend on the worker count."""
        tmp_path, _, responses_path, fit_path = fitted
        outputs = []
        for threads in ("1", "2"):
            out = str(tmp_path / f"mi_{threads}.json")
            assert (
                main(
                    [
                        "--threads",
                        threads,
                        "mi",
                        "--fit",
                        fit_path,
                        "--responses",
                        responses_path,
                        "--candidates",
                        "both",
                        "--out",
                        out,
                    ]
                )
                == 0
            )
            outputs.append(open(out, encoding="utf8").read())

        assert outputs[0] == outputs[1]

    def test_classify(self, fitted, small_data):
        """Test one row per examinee with a profile."""
        tmp_path, _, responses_path, fit_path = fitted
        out = str(tmp_path / "classes.csv")

        assert main(["classify", "--fit", fit_path, "--responses", responses_path, "--out", out]) == 0

        frame = pd.read_csv(out, comment="#")
        assert len(frame) == small_data.values.shape[0]
        assert open(out, encoding="utf8").readline().startswith("# config_hash=")

    def test_custom_mask(self, inputs):
        """Test a custom mask file drives the fit."""
        tmp_path, q_path, responses_path = inputs
        q = read_qmatrix(q_path)
        masks = {
            item_id: [str(attribute + 1) for attribute in q.measured(item)]
            for item, item_id in enumerate(q.item_ids)
        }
        mask_path = tmp_path / "mask.json"
        mask_path.write_text(json.dumps(masks))
        out = str(tmp_path / "custom.json")

        code = main(
            [
                "fit",
                "--responses",
                responses_path,
                "--qmatrix",
                q_path,
                "--model",
                "custom",
                "--mask",
                str(mask_path),
                "--out",
                out,
            ]
        )

        assert code == 0
        assert read_json(out)["spec"]["template"] == "custom"

    def test_simulate(self, tmp_path):
        """Test the study CSV and its manifest."""
        out = str(tmp_path / "study.csv")

        code = main(
            [
                "simulate",
                "--study",
                "type1-q",
                "--examinees",
                "200",
                "--reps",
                "2",
                "--alphas",
                "0.05",
                "--out",
                out,
            ]
        )

        assert code == 0
        frame = pd.read_csv(out, comment="#")
        assert list(frame["parameter"]) == ["lambda_{1,1,(2)}", "lambda_{1,2,(1,2)}", "familywise"]
        manifest = read_json(derived_path(out, ".manifest.json"))
        assert manifest["study"] == "type1-q"
        assert manifest["sample_sizes"] == [200]
        assert os.path.exists(out)


class TestEnvironment:
    """Tests for the worker count resolution."""

    def test_flag_wins(self, monkeypatch, tmp_path):
        """Test --threads overrides the environment."""
        monkeypatch.setenv("DCMMI_THREADS", "5")

        assert EnvironmentManager(str(tmp_path / ".env")).get_threads(2) == 2

    def test_environment_variable(self, monkeypatch, tmp_path):
        """Test the environment variable is read."""
        monkeypatch.setenv("DCMMI_THREADS", "5")

        assert EnvironmentManager(str(tmp_path / ".env")).get_threads() == 5

    def test_dotenv_file(self, monkeypatch, tmp_path):
        """Test the .env file is read when the variable is unset."""
        monkeypatch.delenv("DCMMI_THREADS", raising=False)
        env_path = tmp_path / ".env"
        env_path.write_text("DCMMI_THREADS=3\n")

        assert EnvironmentManager(str(env_path)).get_threads() == 3

    def test_invalid_value(self, monkeypatch, tmp_path):
        """Test a non-integer value is a usage error."""
        monkeypatch.setenv("DCMMI_THREADS", "many")

        with pytest.raises(UsageException, match="must be an integer"):
            EnvironmentManager(str(tmp_path / ".env")).get_threads()
