"""W3C WebDriver wire-protocol client and the environment backend built on it.

Speaks the JSON-over-HTTP subset needed here: New Session, Navigate To, Get
Title, Get Page Source, Take Screenshot, Find Element (xpath), Element Click,
Element Send Keys, Execute Script, Delete Session. Protocol error codes map
to the typed errors used across the environment layer.
"""
from __future__ import annotations

import base64
import json
import time

import requests

from ..dom import parse_html
from ..errors import (
    ElementNotFoundError,
    LoadFailureError,
    NavigationTimeoutError,
    NotInteractableError,
    WebDriverProtocolError,
)
from ..extractor import RenderFacts, facts_from_dict
from . import (
    STATUS_ELEMENT_NOT_FOUND,
    STATUS_NAVIGATION_TIMEOUT,
    STATUS_NOT_INTERACTABLE,
    STATUS_OK,
    ExecutionResult,
    PageObservation,
)

ELEMENT_KEY = "element-6066-11e4-a52e-4f735466cecf"

# Injected on live pages to report, per element, the same facts the simulator
# provides natively: an indexed absolute path, visibility, interactability,
# and whether a user-event handler is registered.
RENDER_INFO_SCRIPT = """
function pathOf(el) {
  var segs = [];
  while (el && el.nodeType === 1) {
    var tag = el.tagName.toLowerCase();
    if (tag === 'html' || tag === 'body') { segs.unshift(tag); }
    else {
      var i = 1, sib = el.previousElementSibling;
      while (sib) { if (sib.tagName === el.tagName) i++; sib = sib.previousElementSibling; }
      segs.unshift(tag + '[' + i + ']');
    }
    el = el.parentElement;
  }
  return segs.join('/');
}
var facts = {};
var all = document.getElementsByTagName('*');
for (var k = 0; k < all.length; k++) {
  var el = all[k];
  var style = window.getComputedStyle(el);
  var box = el.getBoundingClientRect();
  var visible = style.display !== 'none' && style.visibility !== 'hidden'
    && box.width > 0 && box.height > 0;
  var interactable = visible && !el.disabled;
  var hasHandler = typeof el.onclick === 'function' || el.hasAttribute('onclick');
  facts[pathOf(el)] = {visible: visible, interactable: interactable, has_handler: hasHandler};
}
return facts;
""".strip()

READY_STATE_SCRIPT = "return document.readyState"

ERROR_MAP = {
    "no such element": ElementNotFoundError,
    "stale element reference": ElementNotFoundError,
    "element not interactable": NotInteractableError,
    "timeout": NavigationTimeoutError,
    "script timeout": NavigationTimeoutError,
}


class WebDriverSession:
    """One remote session. Request bodies are serialized with sorted keys and
    no padding so wire bytes are stable run to run."""

    def __init__(self, endpoint: str, timeout_s: float = 30.0, http: requests.Session | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        self.http = http or requests.Session()
        self.session_id: str | None = None

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = f"{self.endpoint}{path}"
        body = None
        headers = {}
        if payload is not None:
            body = json.dumps(payload, separators=(",", ":"), sort_keys=True)
            headers["Content-Type"] = "application/json"
        try:
            response = self.http.request(method, url, data=body, headers=headers, timeout=self.timeout_s)
        except requests.Timeout as exc:
            raise NavigationTimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise LoadFailureError(f"webdriver endpoint unreachable: {exc}") from exc
        try:
            decoded = response.json()
        except ValueError as exc:
            raise WebDriverProtocolError(
                f"non-JSON response ({response.status_code})", w3c_error="unknown error"
            ) from exc
        if response.status_code >= 400:
            value = decoded.get("value") or {}
            code = value.get("error", "unknown error")
            message = value.get("message", "")
            raise ERROR_MAP.get(code, WebDriverProtocolError)(
                f"{code}: {message}", **({"w3c_error": code} if code not in ERROR_MAP else {})
            )
        return decoded

    def _session_path(self, suffix: str = "") -> str:
        if self.session_id is None:
            raise WebDriverProtocolError("no active session", w3c_error="invalid session id")
        return f"/session/{self.session_id}{suffix}"

    def new_session(self) -> str:
        decoded = self._request("POST", "/session", {"capabilities": {"alwaysMatch": {}}})
        value = decoded["value"]
        self.session_id = value.get("sessionId") or value.get("session_id")
        if not self.session_id:
            raise WebDriverProtocolError("no session id in New Session response", w3c_error="session not created")
        return self.session_id

    def navigate(self, url: str) -> None:
        self._request("POST", self._session_path("/url"), {"url": url})

    def title(self) -> str:
        return self._request("GET", self._session_path("/title"))["value"] or ""

    def page_source(self) -> str:
        return self._request("GET", self._session_path("/source"))["value"] or ""

    def screenshot(self) -> bytes:
        encoded = self._request("GET", self._session_path("/screenshot"))["value"] or ""
        return base64.b64decode(encoded)

    def find_element(self, xpath: str) -> str:
        locator = xpath if xpath.startswith("/") else "/" + xpath
        decoded = self._request(
            "POST", self._session_path("/element"), {"using": "xpath", "value": locator}
        )
        value = decoded["value"]
        if isinstance(value, dict):
            if ELEMENT_KEY in value:
                return value[ELEMENT_KEY]
            for key in value:
                return value[key]
        raise WebDriverProtocolError("malformed Find Element response", w3c_error="unknown error")

    def click(self, element_id: str) -> None:
        self._request("POST", self._session_path(f"/element/{element_id}/click"), {})

    def send_keys(self, element_id: str, text: str) -> None:
        self._request("POST", self._session_path(f"/element/{element_id}/value"), {"text": text})

    def execute_script(self, script: str, args: list | None = None):
        decoded = self._request(
            "POST", self._session_path("/execute/sync"), {"args": args or [], "script": script}
        )
        return decoded["value"]

    def delete_session(self) -> None:
        if self.session_id is not None:
            self._request("DELETE", self._session_path())
            self.session_id = None


class WebDriverEnvironment:
    """Environment backend over a live (or mock) WebDriver endpoint.

    After each action the page is considered settled when document.readyState
    is complete and a short quiet period has elapsed.
    """

    def __init__(
        self,
        endpoint: str,
        settle_quiet_s: float = 0.2,
        settle_timeout_s: float = 10.0,
        sleeper=time.sleep,
        http: requests.Session | None = None,
    ):
        self.session = WebDriverSession(endpoint, http=http)
        self.settle_quiet_s = settle_quiet_s
        self.settle_timeout_s = settle_timeout_s
        self.sleeper = sleeper
        self.current_url = ""

    def load(self, url: str) -> PageObservation:
        if self.session.session_id is None:
            self.session.new_session()
        self.session.navigate(url)
        self.current_url = url
        self._settle()
        return self._observe(url)

    def _settle(self) -> None:
        deadline = time.monotonic() + self.settle_timeout_s
        while True:
            if self.session.execute_script(READY_STATE_SCRIPT) == "complete":
                break
            if time.monotonic() > deadline:
                raise NavigationTimeoutError("page never reached readyState complete")
            self.sleeper(0.05)
        if self.settle_quiet_s:
            self.sleeper(self.settle_quiet_s)

    def _observe(self, url: str) -> PageObservation:
        source = self.session.page_source()
        raw_info = self.session.execute_script(RENDER_INFO_SCRIPT) or {}
        render_info: dict[str, RenderFacts] = {
            xpath: facts_from_dict(raw) for xpath, raw in raw_info.items()
        }
        try:
            screenshot = self.session.screenshot()
        except WebDriverProtocolError:
            screenshot = None
        return PageObservation(
            document=parse_html(source),
            render_info=render_info,
            title=self.session.title(),
            url=url,
            screenshot=screenshot,
        )

    def execute(self, action) -> ExecutionResult:
        try:
            element_id = self.session.find_element(action.target.xpath)
            if action.operation == "click":
                self.session.click(element_id)
            else:
                self.session.send_keys(element_id, action.input_content or "")
            self._settle()
        except ElementNotFoundError:
            return ExecutionResult(status=STATUS_ELEMENT_NOT_FOUND)
        except NotInteractableError:
            return ExecutionResult(status=STATUS_NOT_INTERACTABLE)
        except NavigationTimeoutError:
            return ExecutionResult(status=STATUS_NAVIGATION_TIMEOUT)
        return ExecutionResult(status=STATUS_OK, new_observation=self._observe(self.current_url))

    def close(self) -> None:
        self.session.delete_session()
