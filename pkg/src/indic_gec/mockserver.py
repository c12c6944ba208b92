"""A local chat-completion server for offline runs and client tests.

By default it echoes the final user message back, which makes a
"do-nothing" GEC system. A status script such as ``[429, 429, 200]``
makes the first requests fail in order before normal service resumes.

    python -m indic_gec.mockserver --port 8765
"""

from __future__ import annotations

import argparse
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockChatServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0, *, statuses=(), delay: float = 0.0,
                 reply=None, retry_after: float | None = None):
        self.statuses = list(statuses)
        self.delay = delay
        self.reply = reply or (lambda text: text)
        self.retry_after = retry_after
        self.n_requests = 0
        self.in_flight = 0
        self.max_in_flight = 0
        self.status_log: list[int] = []
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer((host, port), self._handler())
        self._httpd.daemon_threads = True
        self._thread = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def _next_status(self) -> int:
        with self._lock:
            self.n_requests += 1
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
            status = self.statuses.pop(0) if self.statuses else 200
            self.status_log.append(status)
            return status

    def _handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers.get("content-length", 0))) or b"{}")
                status = server._next_status()
                try:
                    if server.delay:
                        time.sleep(server.delay)
                    if status != 200:
                        self.send_response(status)
                        if server.retry_after is not None:
                            self.send_header("Retry-After", str(server.retry_after))
                        self.send_header("Content-Type", "application/json")
                        self.end_headers()
                        self.wfile.write(b'{"error": "scripted failure"}')
                        return
                    if "messages" in body:
                        last = [m["content"] for m in body["messages"] if m["role"] == "user"][-1]
                        payload = {"model": body.get("model"), "choices": [
                            {"message": {"role": "assistant", "content": server.reply(last)}, "finish_reason": "stop"}]}
                    else:
                        last = [c["parts"][0]["text"] for c in body["contents"] if c["role"] == "user"][-1]
                        payload = {"candidates": [{"content": {"parts": [{"text": server.reply(last)}]},
                                                   "finishReason": "STOP"}]}
                    data = json.dumps(payload, ensure_ascii=False).encode("utf-8")
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                finally:
                    with server._lock:
                        server.in_flight -= 1

        return Handler

    def start(self) -> MockChatServer:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def main(argv=None):
    ap = argparse.ArgumentParser(description="Serve an echoing chat-completion endpoint.")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8765)
    args = ap.parse_args(argv)
    srv = MockChatServer(args.host, args.port)
    print(f"mock chat server on {srv.url} (openai: /chat/completions, gemini: /models/<m>:generateContent)")
    try:
        srv._httpd.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
