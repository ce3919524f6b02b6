"""HTTP serving of a fine-tuned checkpoint.

Implements the generation wire protocol:
  POST /generate  {id, prompt, max_new_tokens, decode}
               -> {id, text, prompt_tokens, output_tokens}
  GET  /health    -> {status, backend_id}
Only greedy decoding is supported; malformed bodies get a 400 with an
error description.
"""

from __future__ import annotations

import threading
from pathlib import Path

import torch
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer


class GenerateBody(BaseModel):
    id: str
    prompt: str
    max_new_tokens: int = 64
    decode: str = "greedy"


def create_app(checkpoint: str | Path, backend_id: str | None = None) -> FastAPI:
    checkpoint = Path(checkpoint)
    if not checkpoint.is_dir():
        raise FileNotFoundError(f"checkpoint directory not found: {checkpoint}")
    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    model = AutoModelForSeq2SeqLM.from_pretrained(checkpoint)
    model.eval()
    # one decode at a time; request handling stays concurrent up to the
    # server's worker count while generation itself is serialized
    decode_lock = threading.Lock()

    app = FastAPI()
    app.state.backend_id = backend_id or checkpoint.name

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)[:500]})

    @app.get("/health")
    def health():
        return {"status": "ok", "backend_id": app.state.backend_id}

    @app.post("/generate")
    def generate(body: GenerateBody):
        if body.decode != "greedy":
            return JSONResponse(
                status_code=400,
                content={"error": f"unsupported decode mode {body.decode!r}"},
            )
        if body.max_new_tokens < 1:
            return JSONResponse(
                status_code=400, content={"error": "max_new_tokens must be >= 1"}
            )
        enc = tokenizer(body.prompt, return_tensors="pt", truncation=True, max_length=512)
        with decode_lock, torch.no_grad():
            out = model.generate(
                **enc,
                max_new_tokens=body.max_new_tokens,
                do_sample=False,
                num_beams=1,
            )
        sequence = out[0]
        text = tokenizer.decode(sequence, skip_special_tokens=True)
        return {
            "id": body.id,
            "text": text,
            "prompt_tokens": int(enc["input_ids"].shape[1]),
            "output_tokens": int(sequence.shape[0]) - 1,  # minus decoder start token
        }

    return app


def serve(checkpoint: str | Path, port: int, host: str = "127.0.0.1") -> None:
    """Run the service in the foreground; fails fast on a missing checkpoint."""
    import uvicorn

    app = create_app(checkpoint)
    uvicorn.run(app, host=host, port=port, log_level="warning")
