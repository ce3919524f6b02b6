import json
import socket
import threading
import time

import pytest
import requests
import uvicorn
from transformers import ByT5Tokenizer, T5Config, T5ForConditionalGeneration


@pytest.fixture(scope="session")
def tiny_base_model(tmp_path_factory):
    """A byte-level seq2seq checkpoint small enough to train on CPU in tests."""
    path = tmp_path_factory.mktemp("base-model")
    tokenizer = ByT5Tokenizer()
    config = T5Config(
        vocab_size=len(tokenizer.get_vocab()),
        d_model=16,
        d_kv=8,
        d_ff=32,
        num_layers=1,
        num_decoder_layers=1,
        num_heads=2,
        decoder_start_token_id=tokenizer.pad_token_id,
    )
    model = T5ForConditionalGeneration(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return str(path)


def write_pairs(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for i, (prompt, target) in enumerate(rows):
            fh.write(json.dumps({"id": f"p{i}", "prompt": prompt, "target": target}) + "\n")
    return path


@pytest.fixture(scope="session")
def pair_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("pairs")
    rows = [
        (f"Definition: classify.\ninput: sample {i}. The aspect is thing.\noutput: ",
         "positive" if i % 2 else "negative")
        for i in range(8)
    ]
    train = write_pairs(root / "train.ndjson", rows[:6])
    val = write_pairs(root / "val.ndjson", rows[6:])
    return {"train": train, "val": val}


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="session")
def live_server(tiny_base_model, pair_files, tmp_path_factory):
    """A trained tiny checkpoint served over HTTP for the protocol suites."""
    from finetune_server.config import TrainConfig
    from finetune_server.serve import create_app
    from finetune_server.train import train as run_train

    out = tmp_path_factory.mktemp("ckpt")
    cfg = TrainConfig(base_model_id=tiny_base_model, epochs=1, batch_size=4)
    ckpt = run_train(cfg, pair_files["train"], pair_files["val"], out,
                     dataset="Rest14", subtask="ATSC", prefix="NER")
    port = _free_port()
    app = create_app(ckpt)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base_url = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            requests.get(base_url + "/health", timeout=1)
            break
        except requests.ConnectionError:
            time.sleep(0.1)
    else:
        raise RuntimeError("server did not come up")
    yield {"url": base_url, "checkpoint": ckpt}
    server.should_exit = True
    thread.join(timeout=5)
