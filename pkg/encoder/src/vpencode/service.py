"""The /embed HTTP service.

Implements the engine's text-embedding contract: POST /embed with
{"texts": [...]} answers {"dim": D, "embeddings": [[...], ...]} with
unit-norm rows, plus GET /healthz for liveness. Requests are handled
concurrently but encoder calls are serialized behind a lock, so
identical concurrent requests get identical bodies.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .encoders import Encoder


def make_server(port: int, encoder: Encoder, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; port 0 picks a free one."""
    lock = threading.Lock()

    class Handler(BaseHTTPRequestHandler):
        def _reply(self, status: int, body: dict) -> None:
            payload = json.dumps(body).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            if self.path == "/healthz":
                self._reply(200, {"status": "ok"})
            else:
                self._reply(404, {"error": "not found"})

        def do_POST(self):
            if self.path != "/embed":
                self._reply(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                doc = json.loads(self.rfile.read(length) or b"")
            except (ValueError, TypeError):
                self._reply(400, {"error": "body must be JSON"})
                return
            texts = doc.get("texts") if isinstance(doc, dict) else None
            if (
                not isinstance(texts, list)
                or not texts
                or any(not isinstance(t, str) for t in texts)
            ):
                self._reply(400, {"error": "body needs a nonempty 'texts' list of strings"})
                return
            try:
                with lock:
                    rows = encoder.embed_texts(texts)
            except Exception as exc:
                self._reply(500, {"error": str(exc)})
                return
            self._reply(
                200,
                {"dim": encoder.dim, "embeddings": [list(map(float, r)) for r in rows]},
            )

        def log_message(self, *args):  # tests and pipelines want quiet servers
            pass

    return ThreadingHTTPServer((host, port), Handler)


def serve_embed(port: int, encoder: Encoder, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted."""
    server = make_server(port, encoder, host)
    bound = server.server_address[1]
    print(f"serving /embed (dim {encoder.dim}) on http://{host}:{bound}")
    try:
        server.serve_forever()
    finally:
        server.server_close()
