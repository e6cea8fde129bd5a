"""Drive the layout service end to end, the way the web playground does.

Starts the server on a free port, posts a few requests, and shows how the
422 response carries the min-content needed to clamp a width slider.
"""

import json
import threading
import urllib.error
import urllib.request

from railyard.cli import make_server

server = make_server(0)
port = server.server_address[1]
threading.Thread(target=server.serve_forever, daemon=True).start()
print(f"service on 127.0.0.1:{port}")


def post(payload):
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}/layout",
        data=json.dumps(payload).encode(),
        method="POST",
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


status, body = post(
    {
        "source": '("a" (+ () "b") "c")',
        "input_kind": "diagram",
        "params": {"target_width": 300, "justify_content": "center"},
    }
)
print(f"\nPOST /layout -> {status}")
print("stats:", json.dumps(body["stats"], indent=2))

status, body = post({"source": '("a" (+ () "b") "c")', "params": {"target_width": 50}})
print(f"\ntoo narrow -> {status}, min_content = {body['min_content']}")

status, body = post({"source": "items := | <item> | <item> , <items>", "input_kind": "bnf", "params": {"target_width": 420}})
print(f"\nbnf rule -> {status}, svg bytes: {len(body['svg'])}")

server.shutdown()
server.server_close()
