"""Config validation, CLI commands, HTTP service round trips."""

import json
import time

import numpy as np
import pytest
import yaml
from click.testing import CliRunner
from fastapi.testclient import TestClient

from dtedesign.cli import main, run_command
from dtedesign.config import ConfigError, build_design, load_config, parse_config
from dtedesign.service import create_app

BASE = {
    "priors": {
        "p_separate": 0.9,
        "p_dte": 0.7,
        "hazard_ratio": {"family": "gamma", "shape": 29.6, "rate": 47.8},
        "delay_months": {"family": "gamma", "shape": 7.29, "rate": 1.76},
        "control": {"rate_per_month": 0.08, "shape": 1.0},
    },
    "design": {
        "n_control": 60,
        "n_experimental": 60,
        "total_events": 90,
        "recruitment_duration_months": 12,
        "information_fractions": [0.5, 1.0],
    },
    "spending": {
        "total_alpha_one_sided": 0.025,
        "total_beta": 0.10,
        "alpha_rule": "direct",
        "beta_rule": "direct",
        "interim_cumulative_alpha": 0.0125,
        "interim_cumulative_beta": 0.05,
    },
    "run": {"n_sims": 150, "master_seed": 99, "workers": 1},
    "sweep": {"interim_fractions": [0.3, 0.7]},
    "bpp": {"information_fraction": 0.5, "n_trials": 3, "n_projections": 30},
}


def config_dict(**overrides):
    raw = json.loads(json.dumps(BASE))
    for path, value in overrides.items():
        node = raw
        keys = path.split(".")
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
    return raw


def write_config(tmp_path, raw):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(raw))
    return str(path)


class TestConfig:
    def test_example_file_parses(self):
        cfg = load_config("configs/example.yaml")
        assert cfg.n_control == 300
        assert cfg.priors.p_separate == 0.9
        assert cfg.sweep_fractions == tuple(np.round(np.arange(0.1, 1.0, 0.1), 1))

    def test_obf_example_builds_with_fixed_alternative(self):
        cfg = load_config("configs/obf_example.yaml")
        # quantile-specified priors are fitted at load
        assert cfg.priors.hr_prior.continuous.params[0] == pytest.approx(29.6, rel=0.05)
        design = build_design(cfg)
        expected_drift = -np.log(0.7) * np.sqrt(450 / 4.0)
        assert design.boundaries.drift == pytest.approx(expected_drift, abs=1e-12)
        # OBF-type boundaries spend almost nothing early
        assert design.boundaries.efficacy_b[0] == pytest.approx(2.963, abs=2e-3)
        assert design.boundaries.cumulative_beta[0] == pytest.approx(0.02, abs=1e-3)

    def test_negative_rate_names_field(self):
        with pytest.raises(ConfigError) as err:
            parse_config(config_dict(**{"priors.control.rate_per_month": -0.08}))
        assert "rate_per_month" in err.value.field

    def test_missing_field_reported(self):
        raw = config_dict()
        del raw["priors"]["p_separate"]
        with pytest.raises(ConfigError) as err:
            parse_config(raw)
        assert err.value.field == "priors.p_separate"

    def test_bad_fractions(self):
        with pytest.raises(ConfigError):
            parse_config(config_dict(**{"design.information_fractions": [0.5, 0.4, 1.0]}))
        with pytest.raises(ConfigError):
            parse_config(config_dict(**{"design.information_fractions": [0.5]}))

    def test_quantile_priors_fit_at_load(self):
        raw = config_dict(**{
            "priors.hazard_ratio": {
                "family": "gamma",
                "quantiles": [[0.25, 0.55], [0.5, 0.6], [0.75, 0.7]],
            }
        })
        cfg = parse_config(raw)
        assert cfg.priors.hr_prior.continuous.params[0] == pytest.approx(29.6, rel=0.05)

    def test_build_design_produces_boundaries(self):
        cfg = parse_config(config_dict())
        design = build_design(cfg)
        assert design.boundaries.efficacy_b[0] == pytest.approx(2.2414, abs=1e-4)
        assert design.boundaries.futility_a[0] < design.boundaries.efficacy_b[0]

    def test_fixed_design_alternative(self):
        cfg = parse_config(config_dict(**{"spending.design_hazard_ratio": 0.6}))
        design = build_design(cfg)
        expected = -np.log(0.6) * np.sqrt(90 / 4.0)
        assert design.boundaries.drift == pytest.approx(expected, abs=1e-12)


class TestCLI:
    def test_oc_command_writes_document(self, tmp_path):
        path = write_config(tmp_path, config_dict())
        out = tmp_path / "result.json"
        runner = CliRunner()
        result = runner.invoke(
            main, ["oc", "--config", path, "--out", str(out)], catch_exceptions=False
        )
        assert result.exit_code == 0
        doc = json.loads(out.read_text())
        assert doc["kind"] == "oc"
        assert 0.0 <= doc["summary"]["assurance"] <= 1.0
        assert "workers" not in doc["config"].get("run", {})

    def test_malformed_config_nonzero_exit(self, tmp_path):
        path = write_config(
            tmp_path, config_dict(**{"priors.control.rate_per_month": -1.0})
        )
        runner = CliRunner()
        result = runner.invoke(main, ["oc", "--config", path])
        assert result.exit_code != 0
        assert "rate_per_month" in result.output

    def test_boundaries_command(self, tmp_path):
        path = write_config(tmp_path, config_dict())
        runner = CliRunner()
        result = runner.invoke(main, ["boundaries", "--config", path])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["kind"] == "boundaries"
        assert len(doc["table"]) == 2
        assert doc["implied_design_hazard_ratio"] < 1.0

    def test_sweep_command_rows(self, tmp_path):
        path = write_config(tmp_path, config_dict(**{"run.n_sims": 60}))
        runner = CliRunner()
        result = runner.invoke(main, ["sweep", "--config", path])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        fractions = [r["fraction"] for r in doc["tables"]["curves_by_fraction"]]
        assert fractions == [0.3, 0.7, 1.0]  # grid plus no-interim baseline

    def test_bpp_command(self, tmp_path):
        path = write_config(tmp_path, config_dict())
        runner = CliRunner()
        result = runner.invoke(main, ["bpp", "--config", path])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        entry = doc["results"][0]
        assert len(entry["bpp_values"]) == 3
        assert 0.0 <= entry["informativeness"] <= 1.0

    def test_seed_override_and_determinism(self, tmp_path):
        path = write_config(tmp_path, config_dict())
        doc_a = run_command("oc", path, seed=7, jobs=1)
        doc_b = run_command("oc", path, seed=7, jobs=2)
        doc_c = run_command("oc", path, seed=8, jobs=1)
        assert doc_a == doc_b  # byte-identical regardless of worker count
        assert doc_a != doc_c


class TestService:
    @pytest.fixture()
    def client(self):
        return TestClient(create_app(max_workers=2))

    def _wait(self, client, job_id, timeout=60.0):
        deadline = time.time() + timeout
        progresses = []
        while time.time() < deadline:
            body = client.get(f"/jobs/{job_id}").json()
            progresses.append(body["progress"])
            if body["status"] in ("done", "failed"):
                return body, progresses
            time.sleep(0.02)
        raise AssertionError("job did not finish in time")

    def test_submit_poll_fetch_matches_cli(self, client, tmp_path):
        raw = config_dict()
        response = client.post("/jobs/oc", json=raw)
        assert response.status_code == 202
        job_id = response.json()["job_id"]
        record, progresses = self._wait(client, job_id)
        assert record["status"] == "done"
        assert progresses == sorted(progresses)  # nondecreasing
        served = client.get(f"/jobs/{job_id}/result").text

        path = write_config(tmp_path, raw)
        assert served == run_command("oc", path)

    def test_two_concurrent_jobs(self, client):
        ids = [client.post("/jobs/oc", json=config_dict()).json()["job_id"] for _ in range(2)]
        assert ids[0] != ids[1]
        for job_id in ids:
            record, _ = self._wait(client, job_id)
            assert record["status"] == "done"

    def test_bpp_job(self, client):
        response = client.post("/jobs/bpp", json=config_dict())
        record, _ = self._wait(client, response.json()["job_id"])
        assert record["status"] == "done"

    def test_invalid_payload_structured_error(self, client):
        bad = config_dict(**{"priors.control.rate_per_month": -2.0})
        response = client.post("/jobs/oc", json=bad)
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["code"] == "invalid_config"
        assert "rate_per_month" in detail["field"]

    def test_unknown_job_404(self, client):
        assert client.get("/jobs/nope").status_code == 404
        assert client.get("/jobs/nope/result").status_code == 404

    def test_result_before_done_409(self, client):
        job_id = client.post("/jobs/oc", json=config_dict(**{"run.n_sims": 5000})).json()["job_id"]
        response = client.get(f"/jobs/{job_id}/result")
        assert response.status_code in (200, 409)  # may already be done
        self._wait(client, job_id)

    def test_prior_density_endpoint(self, client):
        from scipy import stats

        response = client.post(
            "/priors/density", json={"priors": BASE["priors"], "n_points": 50}
        )
        assert response.status_code == 200
        body = json.loads(response.text)
        hr = body["hazard_ratio"]
        assert hr["point_mass"]["probability"] == pytest.approx(0.1)
        x = hr["density"]["x"][25]
        assert hr["density"]["pdf"][25] == pytest.approx(
            stats.gamma.pdf(x, 29.6, scale=1 / 47.8), rel=1e-9
        )
        assert body["delay_months"]["point_mass"]["probability"] == pytest.approx(
            1 - 0.9 * 0.7
        )
        assert body["control_survival"]["survival"][0] == 1.0
