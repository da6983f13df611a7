"""WebSocket front door for streaming recognition.

Wire protocol (JSON text messages, one per WebSocket frame). Every message
carries a protocol version ``v`` (currently 1), a per-session monotonically
increasing ``seq``, a ``type`` and a ``payload``. Client sequence numbers
must strictly increase; the server numbers its own messages independently.

Client -> server:
  init     {"object": {"centroid", "grasp_thumb", "grasp_index", "shape_id"},
            "model": "<model id>" (optional if the server has a default),
            "window": {window overrides} (optional),
            "detector": {detector overrides} (optional)}
  samples  {"samples": [{"t_ms", "x", "y", "confidence"}, ...]}

Server -> client:
  ack        init accepted: {"model": {"id", "kind", "combination"}}
  fixation   {"t_start_ms", "duration_ms", "x", "y"}  (new fixations only)
  features   {"t_ms", "adf2c", "adf2t", "adf2i", "var", "n_fix", "vector"}
  intention  {"t_ms", "label", "fired"}
  error      {"code", "message"}  (the channel closes afterwards)

Plain HTTP endpoints: GET /health, GET /models, GET /scenes.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .core import FixationDetectorConfig, GazeSample, ObjectContext
from .learn import TrainedModel
from .shapes import scene_catalog
from .stream import StreamSession, WindowConfig
from .synth import grasp_offset, SynthConfig

PROTOCOL_VERSION = 1


@dataclass
class ModelStore:
    """Immutable set of models the server can serve sessions with."""

    models: dict[str, TrainedModel] = field(default_factory=dict)
    default_id: str | None = None

    @classmethod
    def from_dir(cls, directory: str, default_id: str | None = None) -> "ModelStore":
        from .io import read_model

        models = {}
        for name in sorted(os.listdir(directory)):
            if name.endswith(".json"):
                models[name[: -len(".json")]] = read_model(os.path.join(directory, name))
        if default_id is None and len(models) == 1:
            default_id = next(iter(models))
        if default_id is not None and default_id not in models:
            raise ValueError(f"default model {default_id!r} not found in {directory}")
        return cls(models=models, default_id=default_id)

    def resolve(self, model_id: str | None) -> tuple[str, TrainedModel]:
        mid = model_id or self.default_id
        if mid is None or mid not in self.models:
            raise KeyError(f"unknown model: {model_id!r}")
        return mid, self.models[mid]


class _ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _parse_init(payload: dict, store: ModelStore):
    try:
        obj = payload["object"]
        context = ObjectContext(
            centroid=tuple(obj["centroid"]),
            grasp_thumb=tuple(obj["grasp_thumb"]),
            grasp_index=tuple(obj["grasp_index"]),
            shape_id=obj.get("shape_id", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _ProtocolError("bad_init", f"invalid object context: {exc}")
    try:
        model_id, model = store.resolve(payload.get("model"))
    except KeyError as exc:
        raise _ProtocolError("unknown_model", str(exc))
    try:
        window = WindowConfig(**payload.get("window", {}))
        detector = FixationDetectorConfig(**payload.get("detector", {}))
    except (TypeError, ValueError) as exc:
        raise _ProtocolError("bad_init", f"invalid config: {exc}")
    return context, model_id, model, window, detector


def build_app(store: ModelStore, scene_half_extent: float | None = None) -> FastAPI:
    """The service application; sessions share only the immutable model store."""
    if scene_half_extent is None:
        scene_half_extent = grasp_offset(SynthConfig())[0]
    app = FastAPI(title="gazeintent service")
    catalog = scene_catalog(scene_half_extent)

    @app.get("/health")
    def health():
        return {"status": "ok", "v": PROTOCOL_VERSION, "models": len(store.models)}

    @app.get("/models")
    def models():
        return {
            "models": [
                {"id": mid, "kind": m.kind.value, "combination": m.combination.value}
                for mid, m in sorted(store.models.items())
            ],
            "default": store.default_id,
        }

    @app.get("/scenes")
    def scenes():
        return catalog

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        out_seq = 0

        async def send(msg_type: str, payload: dict):
            nonlocal out_seq
            out_seq += 1
            await ws.send_text(
                json.dumps({"v": PROTOCOL_VERSION, "seq": out_seq, "type": msg_type, "payload": payload})
            )

        async def fail(code: str, message: str):
            await send("error", {"code": code, "message": message})
            await ws.close()

        last_client_seq = 0
        stream_session: StreamSession | None = None
        last_fixation_start = float("-inf")

        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    msg_type = msg["type"]
                    seq = int(msg["seq"])
                    payload = msg.get("payload", {})
                except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                    await fail("malformed", "messages must be JSON with type, seq and payload")
                    return
                if seq <= last_client_seq:
                    await fail("bad_seq", f"client seq must strictly increase (got {seq})")
                    return
                last_client_seq = seq

                if stream_session is None:
                    if msg_type != "init":
                        await fail("init_required", "first message must be init")
                        return
                    try:
                        context, model_id, model, window, detector = _parse_init(payload, store)
                    except _ProtocolError as exc:
                        await fail(exc.code, str(exc))
                        return
                    stream_session = StreamSession(context, model, window, detector)
                    await send(
                        "ack",
                        {"model": {"id": model_id, "kind": model.kind.value,
                                   "combination": model.combination.value}},
                    )
                    continue

                if msg_type != "samples":
                    await fail("bad_type", f"unexpected message type {msg_type!r}")
                    return
                try:
                    batch = [
                        GazeSample(t_ms=s["t_ms"], x=s["x"], y=s["y"],
                                   confidence=s.get("confidence", 1.0))
                        for s in payload["samples"]
                    ]
                    events = stream_session.push_samples(batch)
                except (KeyError, TypeError, ValueError) as exc:
                    await fail("bad_samples", str(exc))
                    return

                for event in events:
                    for f in event.fixations:
                        if f.t_start_ms > last_fixation_start:
                            last_fixation_start = f.t_start_ms
                            await send("fixation", {"t_start_ms": f.t_start_ms,
                                                    "duration_ms": f.duration_ms,
                                                    "x": f.x, "y": f.y})
                    if event.window_features is not None:
                        fv = event.window_features
                        payload_fv = fv.as_dict()
                        payload_fv["t_ms"] = event.t_ms
                        payload_fv["vector"] = list(fv.project(stream_session.model.combination.members))
                        await send("features", payload_fv)
                    await send("intention", {"t_ms": event.t_ms, "label": event.label.value,
                                             "fired": event.fired})
        except WebSocketDisconnect:
            return  # per-session state dies with the handler

    return app


def run_server(store: ModelStore, host: str = "127.0.0.1", port: int = 8099):
    import uvicorn

    uvicorn.run(build_app(store), host=host, port=port, log_level="warning")
