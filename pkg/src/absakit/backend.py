"""Text-generation transport: HTTP client, deterministic mocks, batching.

Wire protocol: single ``POST /generate`` with JSON body
``{id, prompt, max_new_tokens, decode}`` answered by
``{id, text, prompt_tokens, output_tokens}``. Greedy decoding is the only
mode. Mock backends are addressed by ``mock:`` endpoints so tests and the
experiment runner share one code path.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import requests

DEFAULT_MAX_NEW_TOKENS = 64


class BackendError(RuntimeError):
    """Protocol or transport failure talking to a generation backend."""

    def __init__(self, message: str, retriable: bool = False):
        super().__init__(message)
        self.retriable = retriable


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    request_id: str
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS
    decode: str = "greedy"

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt is empty")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        if self.decode != "greedy":
            raise ValueError("greedy decoding is the only supported mode")


@dataclass(frozen=True)
class GenerationResponse:
    request_id: str
    text: str
    backend_id: str
    latency_ms: float
    token_counts: tuple[int, int] | None = None


@dataclass(frozen=True)
class BackendDescriptor:
    endpoint: str
    timeout: float = 30.0
    max_in_flight: int = 8
    max_retries: int = 2
    backoff: float = 0.5

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass
class BatchItem:
    request_id: str
    response: GenerationResponse | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.response is not None


# -- mock backends -----------------------------------------------------------

_MOCK_REGISTRY: dict[str, Callable[[GenerationRequest], str]] = {}


def register_mock(name: str, fn: Callable[[GenerationRequest], str]) -> str:
    """Register a mock generator; returns the `mock:` endpoint addressing it."""
    _MOCK_REGISTRY[name] = fn
    return f"mock:{name}"


def gold_replay_mock(answers: dict[str, str], name: str = "gold-replay") -> str:
    """Mock that replays the gold answer keyed by request id."""

    def replay(req: GenerationRequest) -> str:
        if req.request_id not in answers:
            raise BackendError(f"no gold answer for request {req.request_id}")
        return answers[req.request_id]

    return register_mock(name, replay)


def constant_mock(text: str, name: str = "constant") -> str:
    return register_mock(name, lambda req: text)


def echo_mock(name: str = "echo") -> str:
    """Mock whose response is the last line of the prompt."""
    return register_mock(name, lambda req: req.prompt.rsplit("\n", 1)[-1])


class ConcurrencyProbe:
    """Wraps a mock to record peak concurrent invocations."""

    def __init__(self, fn: Callable[[GenerationRequest], str], delay: float = 0.0):
        self._fn = fn
        self._delay = delay
        self._lock = threading.Lock()
        self._active = 0
        self.peak = 0

    def __call__(self, req: GenerationRequest) -> str:
        with self._lock:
            self._active += 1
            self.peak = max(self.peak, self._active)
        try:
            if self._delay:
                time.sleep(self._delay)
            return self._fn(req)
        finally:
            with self._lock:
                self._active -= 1


# -- generation --------------------------------------------------------------

def _http_generate(backend: BackendDescriptor, req: GenerationRequest) -> GenerationResponse:
    started = time.monotonic()
    body = {
        "id": req.request_id,
        "prompt": req.prompt,
        "max_new_tokens": req.max_new_tokens,
        "decode": req.decode,
    }
    try:
        resp = requests.post(
            backend.endpoint.rstrip("/") + "/generate", json=body, timeout=backend.timeout
        )
    except requests.Timeout as exc:
        raise BackendError(f"timeout after {backend.timeout}s", retriable=True) from exc
    except requests.ConnectionError as exc:
        raise BackendError(f"connection failed: {exc}", retriable=True) from exc
    if resp.status_code != 200:
        raise BackendError(f"HTTP {resp.status_code}: {resp.text[:500]}")
    try:
        payload = resp.json()
        text = payload["text"]
        echoed = payload["id"]
    except (ValueError, KeyError) as exc:
        raise BackendError(f"malformed response body: {exc}") from exc
    if echoed != req.request_id:
        raise BackendError(f"response id {echoed!r} does not echo request {req.request_id!r}")
    counts = None
    if payload.get("prompt_tokens") is not None:
        counts = (payload["prompt_tokens"], payload.get("output_tokens", 0))
    return GenerationResponse(
        request_id=req.request_id,
        text=text,
        backend_id=backend.endpoint,
        latency_ms=(time.monotonic() - started) * 1000,
        token_counts=counts,
    )


def _mock_generate(backend: BackendDescriptor, req: GenerationRequest) -> GenerationResponse:
    name = backend.endpoint[len("mock:"):]
    fn = _MOCK_REGISTRY.get(name)
    if fn is None:
        raise BackendError(f"no mock registered under {name!r}")
    started = time.monotonic()
    text = fn(req)
    return GenerationResponse(
        request_id=req.request_id,
        text=text,
        backend_id=backend.endpoint,
        latency_ms=(time.monotonic() - started) * 1000,
    )


def generate(backend: BackendDescriptor, req: GenerationRequest) -> GenerationResponse:
    """Run one request, retrying retriable transport failures with backoff."""
    attempts = backend.max_retries + 1
    last: BackendError | None = None
    for attempt in range(attempts):
        try:
            if backend.endpoint.startswith("mock:"):
                return _mock_generate(backend, req)
            return _http_generate(backend, req)
        except BackendError as exc:
            last = exc
            if not exc.retriable or attempt == attempts - 1:
                raise
            time.sleep(backend.backoff * (2 ** attempt))
    raise last  # unreachable


def batch_generate(
    backend: BackendDescriptor, reqs: list[GenerationRequest]
) -> list[BatchItem]:
    """Run requests with bounded concurrency; results keep request order.

    Failures are isolated per item. Duplicate request ids are rejected up
    front so a response can never be delivered twice.
    """
    ids = [r.request_id for r in reqs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate request ids in batch")

    def work(req: GenerationRequest) -> BatchItem:
        try:
            return BatchItem(request_id=req.request_id, response=generate(backend, req))
        except BackendError as exc:
            return BatchItem(request_id=req.request_id, error=str(exc))

    with ThreadPoolExecutor(max_workers=backend.max_in_flight) as pool:
        return list(pool.map(work, reqs))


# -- black-box protocol conformance -------------------------------------------

@dataclass
class ProtocolCheck:
    name: str
    ok: bool
    detail: str = ""


def check_protocol(base_url: str, timeout: float = 30.0) -> list[ProtocolCheck]:
    """Black-box wire-protocol suite run against a live HTTP service.

    Covers liveness, the generate contract, malformed-body rejection, and
    response ordering under concurrent batched requests. The same suite is
    expected to pass against any conforming server implementation.
    """
    checks: list[ProtocolCheck] = []

    resp = requests.get(base_url.rstrip("/") + "/health", timeout=timeout)
    ok = resp.status_code == 200 and "backend_id" in resp.json()
    checks.append(ProtocolCheck("health", ok, f"status {resp.status_code}"))

    backend = BackendDescriptor(endpoint=base_url, timeout=timeout)
    req = GenerationRequest(prompt="input: hello\noutput: ", request_id="proto-1")
    try:
        out = generate(backend, req)
        ok = out.request_id == "proto-1" and isinstance(out.text, str)
        checks.append(ProtocolCheck("generate", ok, f"text={out.text[:40]!r}"))
    except BackendError as exc:
        checks.append(ProtocolCheck("generate", False, str(exc)))

    resp = requests.post(
        base_url.rstrip("/") + "/generate",
        data=b"{not json",
        headers={"Content-Type": "application/json"},
        timeout=timeout,
    )
    checks.append(
        ProtocolCheck("malformed-body", 400 <= resp.status_code < 500, f"status {resp.status_code}")
    )

    reqs = [
        GenerationRequest(prompt=f"input: item {i}\noutput: ", request_id=f"proto-batch-{i}")
        for i in range(8)
    ]
    items = batch_generate(BackendDescriptor(endpoint=base_url, timeout=timeout, max_in_flight=4), reqs)
    in_order = [it.request_id for it in items] == [r.request_id for r in reqs]
    all_ok = all(it.ok for it in items)
    checks.append(ProtocolCheck("batch-ordering", in_order and all_ok, f"{len(items)} items"))
    return checks
