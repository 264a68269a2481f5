"""Scripted in-process WebDriver endpoint.

Serves the protocol subset the client speaks, records every request it
receives (method, path, raw body) so wire-level conformance can be checked
against golden transcripts, and lets tests stage pages, element tables,
render-info payloads and forced protocol errors. One session at a time.
"""
from __future__ import annotations

import base64
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

MOCK_SESSION_ID = "mock-session-1"
MOCK_SCREENSHOT = base64.b64encode(b"mock-png-bytes").decode("ascii")

_ELEMENT_PATH = re.compile(r"^/session/([^/]+)/element/([^/]+)/(click|value)$")


class MockWebDriverServer:
    def __init__(self):
        self.pages: dict[str, str] = {}
        self.render_infos: dict[str, dict] = {}
        self.titles: dict[str, str] = {}
        # xpath locator -> element id; element id -> behavior dict
        self.elements: dict[str, str] = {}
        self.element_behavior: dict[str, dict] = {}
        self.screenshot_b64 = MOCK_SCREENSHOT
        self.forced_errors: list[tuple[str, int, str, str]] = []  # (path substring, status, code, message)

        self.transcript: list[dict] = []
        self.current_url = ""
        self.session_active = False
        self.typed: list[tuple[str, str]] = []

        handler = self._make_handler()
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def start(self) -> "MockWebDriverServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def stage_page(self, url: str, html: str, title: str = "", render_info: dict | None = None) -> None:
        self.pages[url] = html
        self.titles[url] = title
        self.render_infos[url] = render_info or {}

    def force_error(self, path_substring: str, status: int, code: str, message: str = "") -> None:
        self.forced_errors.append((path_substring, status, code, message))

    # --- request handling -----------------------------------------------

    def _handle(self, method: str, path: str, body: str) -> tuple[int, dict]:
        self.transcript.append({"method": method, "path": path, "body": body})

        for index, (needle, status, code, message) in enumerate(self.forced_errors):
            if needle in path:
                del self.forced_errors[index]
                return status, {"value": {"error": code, "message": message, "stacktrace": ""}}

        payload = json.loads(body) if body else {}

        if method == "POST" and path == "/session":
            if self.session_active:
                return 500, {"value": {"error": "session not created", "message": "one session at a time", "stacktrace": ""}}
            self.session_active = True
            return 200, {"value": {"sessionId": MOCK_SESSION_ID, "capabilities": {}}}

        if not self.session_active or f"/session/{MOCK_SESSION_ID}" not in path:
            return 404, {"value": {"error": "invalid session id", "message": "no such session", "stacktrace": ""}}

        if method == "DELETE" and path == f"/session/{MOCK_SESSION_ID}":
            self.session_active = False
            return 200, {"value": None}

        if method == "POST" and path.endswith("/url"):
            self.current_url = payload.get("url", "")
            return 200, {"value": None}

        if method == "GET" and path.endswith("/title"):
            return 200, {"value": self.titles.get(self.current_url, "")}

        if method == "GET" and path.endswith("/source"):
            return 200, {"value": self.pages.get(self.current_url, "<html><body></body></html>")}

        if method == "GET" and path.endswith("/screenshot"):
            return 200, {"value": self.screenshot_b64}

        if method == "POST" and path.endswith("/execute/sync"):
            script = payload.get("script", "")
            if "readyState" in script:
                return 200, {"value": "complete"}
            return 200, {"value": self.render_infos.get(self.current_url, {})}

        if method == "POST" and path.endswith("/element"):
            locator = payload.get("value", "")
            element_id = self.elements.get(locator) or self.elements.get(locator.lstrip("/"))
            if element_id is None:
                return 404, {
                    "value": {
                        "error": "no such element",
                        "message": f"Unable to locate element: {locator}",
                        "stacktrace": "",
                    }
                }
            return 200, {"value": {"element-6066-11e4-a52e-4f735466cecf": element_id}}

        match = _ELEMENT_PATH.match(path)
        if match and method == "POST":
            element_id, command = match.group(2), match.group(3)
            behavior = self.element_behavior.get(element_id, {})
            if behavior.get("error"):
                code = behavior["error"]
                return 400, {"value": {"error": code, "message": "", "stacktrace": ""}}
            if command == "value":
                self.typed.append((element_id, payload.get("text", "")))
            if command == "click" and behavior.get("navigate"):
                self.current_url = behavior["navigate"]
            return 200, {"value": None}

        return 404, {"value": {"error": "unknown command", "message": path, "stacktrace": ""}}

    def _make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _dispatch(self, method: str):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length).decode("utf-8") if length else ""
                status, response = server._handle(method, self.path, body)
                encoded = json.dumps(response).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(encoded)))
                self.end_headers()
                self.wfile.write(encoded)

            def do_GET(self):
                self._dispatch("GET")

            def do_POST(self):
                self._dispatch("POST")

            def do_DELETE(self):
                self._dispatch("DELETE")

        return Handler
