import json

import pytest

from railyard.cli import (
    EXIT_ILL_FORMED,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_TOO_SMALL,
    handle_layout_request,
    run_cli,
)
from railyard.layout import parse_layout, top_level_well_formed


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCli:
    def test_regex_happy_path(self, capsys):
        code, out, err = run(
            capsys, "a (b|c)*", "--input-kind", "regex", "--width", "400"
        )
        assert code == EXIT_OK
        assert out.startswith("<svg")
        assert 'width="400"' in out

    def test_width_too_small(self, capsys):
        code, out, err = run(capsys, '"a"', "--width", "1")
        assert code == EXIT_TOO_SMALL
        assert "38" in err  # computed min-content in the message

    def test_dump_aligned(self, capsys):
        code, out, err = run(capsys, '("x" "y")', "--dump", "aligned")
        assert code == EXIT_OK
        assert out.strip() == (
            '(ltr (logical 1) (logical 1) (station ltr "x" #t) (station ltr "y" #t))'
        )

    def test_dump_layout_reparses(self, capsys):
        code, out, _ = run(capsys, '(+ "a" "b")', "--width", "300", "--dump", "layout")
        assert code == EXIT_OK
        assert top_level_well_formed(parse_layout(out)).ok

    def test_parse_error_exits_1(self, capsys):
        code, _, err = run(capsys, '("a"', "--width", "100")
        assert code == EXIT_INPUT
        assert "error" in err

    def test_bad_flag_exits_1(self, capsys):
        code, _, _ = run(capsys, '"a"', "--align", "sideways")
        assert code == EXIT_INPUT

    def test_layout_kind_well_formed(self, capsys):
        code, out, _ = run(
            capsys, '(station ltr "a" #t)', "--input-kind", "layout"
        )
        assert code == EXIT_OK
        assert out.startswith("<svg")

    def test_layout_kind_violations_exit_3(self, capsys):
        code, _, err = run(capsys, "(space ltr)", "--input-kind", "layout")
        assert code == EXIT_ILL_FORMED
        assert "WF_top" in err

    def test_bnf_writes_one_svg_per_rule(self, capsys, tmp_path):
        grammar = tmp_path / "g.bnf"
        grammar.write_text("list := [ <items> ]\nitems := | <item>\n", encoding="utf-8")
        code, _, _ = run(
            capsys, str(grammar), "--input-kind", "bnf", "-o", str(tmp_path / "out")
        )
        assert code == EXIT_OK
        assert (tmp_path / "out" / "list.svg").exists()
        assert (tmp_path / "out" / "items.svg").exists()
        assert (tmp_path / "out" / "list.svg").read_text().startswith("<svg")

    def test_output_file(self, capsys, tmp_path):
        out_file = tmp_path / "d.svg"
        code, out, _ = run(capsys, '"a"', "--width", "38", "-o", str(out_file))
        assert code == EXIT_OK
        assert out == ""
        assert out_file.read_text().startswith("<svg")

    def test_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO('"from-stdin"'))
        code, out, _ = run(capsys, "-", "--width", "200")
        assert code == EXIT_OK
        assert "from-stdin" in out


class TestServiceHandler:
    def post(self, payload) -> tuple[int, dict]:
        body = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
        return handle_layout_request(body)

    def test_happy_path(self):
        status, resp = self.post(
            {"source": '"a"', "input_kind": "diagram", "params": {"target_width": 200}}
        )
        assert status == 200
        assert resp["svg"].startswith("<svg")
        assert resp["stats"]["chosen_content"] <= 200
        assert resp["diagnostics"] == []

    def test_below_min_content_is_422(self):
        status, resp = self.post(
            {"source": '"a"', "input_kind": "diagram", "params": {"target_width": 10}}
        )
        assert status == 422
        assert resp["min_content"] == 38

    def test_malformed_json_is_400(self):
        status, resp = self.post(b"{nope")
        assert status == 400
        assert "JSON" in resp["error"]

    def test_unknown_keys_rejected(self):
        status, resp = self.post({"source": '"a"', "wat": 1})
        assert status == 400

    def test_bad_policy_rejected(self):
        status, resp = self.post(
            {"source": '"a"', "params": {"target_width": 100, "align_items": "middle"}}
        )
        assert status == 400

    def test_identical_requests_identical_svg(self):
        payload = {
            "source": '("a" (+ () "b"))',
            "input_kind": "diagram",
            "params": {"target_width": 300, "justify_content": "center"},
        }
        _, first = self.post(payload)
        _, second = self.post(payload)
        assert first["svg"] == second["svg"]

    def test_regex_kind(self):
        status, resp = self.post(
            {"source": "a b*", "input_kind": "regex", "params": {"target_width": 300}}
        )
        assert status == 200
        assert "rr-vc-block rr-neg" in resp["svg"]

    def test_layout_kind_diagnostics(self):
        status, resp = self.post(
            {"source": "(space ltr)", "input_kind": "layout", "params": {}}
        )
        assert status == 200
        assert resp["svg"] == ""
        assert any("WF_top" in d for d in resp["diagnostics"])

    def test_bnf_multi_rule_warns(self):
        status, resp = self.post(
            {
                "source": "a := x\nb := y",
                "input_kind": "bnf",
                "params": {"target_width": 200},
            }
        )
        assert status == 200
        assert resp["svg"].startswith("<svg")
        assert any("2 rules" in d for d in resp["diagnostics"])

    def test_style_override_flows_into_rendering(self):
        # a custom unit width must be used by layout and renderer alike
        status, resp = self.post(
            {
                "source": '(+ "a" "b")',
                "params": {"target_width": 300, "style": {"s": 14.0, "char_width": 9.0}},
            }
        )
        assert status == 200
        assert 'width="300"' in resp["svg"]

    def test_layout_kind_honors_style(self):
        # widths check out under s=12 but not under the default 10
        status, resp = self.post(
            {
                "source": (
                    "(vconcat-block ltr (logical 1) (logical 1) + "
                    "(hconcat ltr (space ltr) (rail ltr 14) (space ltr)) "
                    "(hconcat ltr (space ltr) (rail ltr 14) (space ltr)))"
                ),
                "input_kind": "layout",
                "params": {"style": {"s": 12.0}},
            }
        )
        assert status == 200
        assert resp["diagnostics"] == []
        assert resp["svg"].startswith("<svg")

    def test_weighted_order_accepted(self):
        status, resp = self.post(
            {
                "source": '("a" "b" "c")',
                "params": {
                    "target_width": 260,
                    "wrap_mode": "global",
                    "order": {
                        "mode": "weighted",
                        "weights": {"content": 0.1, "penalty": 5.0, "height": 1.0},
                    },
                },
            }
        )
        assert status == 200

    def test_dump_passthrough(self):
        status, resp = self.post(
            {"source": '"a"', "params": {"target_width": 100}, "dump": "immediate"}
        )
        assert status == 200
        assert resp["dump"] == '(station ltr "a" #t)'


class TestServiceSocket:
    @pytest.fixture
    def server(self):
        import threading

        from railyard.cli import make_server

        srv = make_server(0)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        yield srv
        srv.shutdown()
        srv.server_close()

    def test_post_layout_roundtrip(self, server):
        import urllib.request

        port = server.server_address[1]
        body = json.dumps(
            {"source": '"a"', "input_kind": "diagram", "params": {"target_width": 200}}
        ).encode()
        req = urllib.request.Request(
            f"http://127.0.0.1:{port}/layout", data=body, method="POST"
        )
        with urllib.request.urlopen(req) as resp:
            assert resp.status == 200
            payload = json.loads(resp.read())
        assert payload["svg"].startswith("<svg")

    def test_parallel_requests_are_independent(self, server):
        import urllib.request
        from concurrent.futures import ThreadPoolExecutor

        port = server.server_address[1]

        def fetch(target):
            body = json.dumps(
                {"source": '("a" (+ () "b"))', "params": {"target_width": target}}
            ).encode()
            req = urllib.request.Request(
                f"http://127.0.0.1:{port}/layout", data=body, method="POST"
            )
            with urllib.request.urlopen(req) as resp:
                return json.loads(resp.read())["svg"]

        targets = [260, 300, 340, 380] * 3
        with ThreadPoolExecutor(max_workers=6) as pool:
            svgs = list(pool.map(fetch, targets))
        # identical requests give identical bytes, regardless of interleaving
        by_target = {}
        for target, svg in zip(targets, svgs):
            assert f'width="{target}"' in svg
            assert by_target.setdefault(target, svg) == svg

    def test_static_dir_served(self, tmp_path):
        import threading
        import urllib.request

        from railyard.cli import make_server

        (tmp_path / "index.html").write_text("<html>playground</html>")
        srv = make_server(0, static_dir=str(tmp_path))
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        try:
            port = srv.server_address[1]
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/") as resp:
                assert b"playground" in resp.read()
        finally:
            srv.shutdown()
            srv.server_close()

    def test_static_dir_from_environment(self, tmp_path, monkeypatch):
        from railyard.cli import make_server

        (tmp_path / "index.html").write_text("x")
        monkeypatch.setenv("RAILYARD_STATIC_DIR", str(tmp_path))
        srv = make_server(0)
        try:
            handler = srv.RequestHandlerClass
            assert handler.static_dir == tmp_path
        finally:
            srv.server_close()
