"""Command-line tool: exit codes, output formats, served end-to-end run."""

import json
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest

from irtplace.cli import main, read_response_file
from irtplace.reference import reference_csv
from irtplace.repository import Repository
from irtplace.xml_io import parse_item_bank


@pytest.fixture
def responses_csv(tmp_path):
    path = tmp_path / "responses.csv"
    path.write_text(reference_csv(), encoding="utf-8")
    return path


class TestValidate:
    def test_fixture_repo_exits_zero(self, repo_dir, capsys):
        assert main(["validate", str(repo_dir)]) == 0
        assert "no findings" in capsys.readouterr().out

    def test_cycle_exits_one_and_names_members(self, repo_dir, capsys):
        ra = repo_dir / "competences" / "relational-algebra.xml"
        ra.write_text(
            ra.read_text(encoding="utf-8").replace(
                "<delivery", '<prerequisite ref="sql" />\n  <delivery'
            ),
            encoding="utf-8",
        )
        assert main(["validate", str(repo_dir)]) == 1
        out = capsys.readouterr().out
        assert "prerequisite-cycle" in out
        assert "sql" in out and "relational-algebra" in out

    def test_missing_directory_exits_two(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "missing")]) == 2

    def test_malformed_document_exits_two(self, repo_dir, capsys):
        (repo_dir / "banks" / "broken.xml").write_text("<itemBank><item>", encoding="utf-8")
        assert main(["validate", str(repo_dir)]) == 2


class TestEstimate:
    def test_reference_file(self, responses_csv, capsys):
        assert main(["estimate", "--responses", str(responses_csv), "--theta0", "1.0"]) == 0
        out = capsys.readouterr().out
        assert "status=converged" in out
        theta = float(out.split("theta=")[1].split()[0])
        se = float(out.split("se=")[1].split()[0])
        assert theta == pytest.approx(1.4882, abs=1e-3)
        assert se == pytest.approx(0.4740, abs=1e-3)

    def test_json_format(self, responses_csv, capsys):
        assert (
            main(
                [
                    "estimate",
                    "--responses",
                    str(responses_csv),
                    "--theta0",
                    "1.0",
                    "--format",
                    "json",
                ]
            )
            == 0
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "converged"
        assert payload["items"] == 20
        assert payload["theta"] == pytest.approx(1.4882, abs=1e-3)

    def test_trace_prints_reference_first_row(self, responses_csv, capsys):
        assert (
            main(
                ["estimate", "--responses", str(responses_csv), "--theta0", "1.0", "--trace"]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "i U_i" in out and "P_i" in out and "Denom" in out
        first_table = out.split("iteration 2")[0]
        row_one = next(line for line in first_table.splitlines() if line.strip().startswith("1 "))
        for cell in ("0.7109", "0.2891", "-0.7109", "0.2055"):
            assert cell in row_one

    def test_malformed_line_exits_two_with_line_number(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("item_id,a,b,u\nq1,1.0,0.1,1\nq2,oops,0.2,1\n", encoding="utf-8")
        assert main(["estimate", "--responses", str(path)]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_all_zero_scores(self, tmp_path, capsys):
        path = tmp_path / "zeros.csv"
        path.write_text(
            "\n".join(f"q{i},1.0,{0.1 * i:.1f},0" for i in range(1, 11)) + "\n",
            encoding="utf-8",
        )
        assert main(["estimate", "--responses", str(path)]) == 0
        out = capsys.readouterr().out
        assert "status=non_finite_mle" in out
        assert "theta=-3" in out

    def test_missing_file_exits_two(self, tmp_path):
        assert main(["estimate", "--responses", str(tmp_path / "nope.csv")]) == 2

    def test_header_detection(self, responses_csv):
        responses = read_response_file(responses_csv)
        assert len(responses) == 20
        assert [r.u for r in responses][:4] == [0, 1, 1, 0]


class TestDemoPaper:
    def test_passes(self, capsys):
        assert main(["demo-paper"]) == 0
        out = capsys.readouterr().out
        assert out.strip().endswith("PASS")
        assert "FAIL" not in out

    def test_other_start_reaches_same_estimate(self, capsys):
        assert main(["demo-paper"]) == 0
        default_out = capsys.readouterr().out
        assert main(["demo-paper", "--theta0", "0"]) == 0
        other_out = capsys.readouterr().out

        def final_theta(text):
            line = next(l for l in text.splitlines() if l.startswith("final theta"))
            return float(line.split("=")[1].split()[0])

        assert abs(final_theta(default_out) - final_theta(other_out)) < 1e-3

    def test_output_stable_across_runs(self, capsys):
        main(["demo-paper"])
        first = capsys.readouterr().out
        main(["demo-paper"])
        second = capsys.readouterr().out
        assert first == second


class TestSimulateCommand:
    def test_zero_reps_is_a_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--reps", "0"])
        assert excinfo.value.code == 2

    def test_fixed_seed_reproduces_csv(self, capsys):
        args = [
            "simulate", "--thetas", "0", "--items", "25", "--reps", "40",
            "--seed", "7", "--format", "csv",
        ]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert first == capsys.readouterr().out
        assert first.startswith("# generator=")
        assert "true_theta," in first

    def test_text_report_has_rows(self, capsys):
        assert main(["simulate", "--thetas", "-1", "1", "--items", "30", "--reps", "25"]) == 0
        out = capsys.readouterr().out
        assert "recovery report" in out
        assert out.count("\n") >= 4


class TestServe:
    def test_bad_listen_address_exits_two(self, repo_dir):
        assert main(["serve", "--listen", "nonsense", "--repo", str(repo_dir)]) == 2
        assert main(["serve", "--listen", "127.0.0.1:notaport", "--repo", str(repo_dir)]) == 2

    def test_missing_repo_exits_two(self, tmp_path):
        assert main(["serve", "--repo", str(tmp_path / "missing")]) == 2

    def test_served_session_end_to_end(self, repo_dir, tmp_path):
        """Boot the real server, run a full scripted session over HTTP,
        interrupt it, and check the profile was flushed to disk."""
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        process = subprocess.Popen(
            [
                sys.executable, "-m", "irtplace.cli", "serve",
                "--listen", f"127.0.0.1:{port}",
                "--repo", str(repo_dir),
                "--events", str(tmp_path / "events"),
            ],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
        )
        base = f"http://127.0.0.1:{port}"
        try:
            for _ in range(100):
                try:
                    httpx.get(base + "/api/competences", timeout=1.0)
                    break
                except httpx.TransportError:
                    time.sleep(0.1)
            else:
                pytest.fail("server did not come up")

            items = {
                item.id: item
                for item in parse_item_bank(
                    (repo_dir / "banks" / "sql-bank.xml").read_text(encoding="utf-8")
                )
            }
            created = httpx.post(
                base + "/api/sessions",
                json={"learnerRef": "learner-001", "competenceRef": "sql"},
            ).json()
            question = created["firstQuestion"]
            for _ in range(20):
                item = items[question["itemId"]]
                payload = httpx.post(
                    base + f"/api/sessions/{created['sessionId']}/answers",
                    json={"itemId": item.id, "choiceId": item.correct_choice},
                ).json()
                question = payload.get("nextQuestion")
            result = httpx.get(
                base + f"/api/sessions/{created['sessionId']}/result"
            ).json()
            assert result["status"] == "non_finite_mle"  # all answers correct
            assert result["theta"] == 3.0
        finally:
            process.send_signal(signal.SIGINT)
            try:
                exit_code = process.wait(timeout=10)
            except subprocess.TimeoutExpired:
                process.kill()
                pytest.fail("server did not shut down on SIGINT")
        assert exit_code == 0
        flushed = Repository.load(repo_dir).profiles["learner-001"]
        assert len(flushed.records) == 1
        assert flushed.records[0].theta == 3.0
