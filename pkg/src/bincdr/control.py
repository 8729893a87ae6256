"""WebSocket control surface for the streaming engine.

JSON text frames, client to engine:
    {"type": "set_param", "name": "S"|"lambda"|"mu"|"g_min", "value": number}
    {"type": "bypass", "on": bool}
    {"type": "get_state"}
Engine to client:
    {"type": "ack", "name": ..., "value": ...}
    {"type": "state", "S": ..., "lambda": ..., "mu": ..., "g_min": ..., "bypass": ...}
    {"type": "telemetry", "frame": ..., "band_cdr": [...], "band_gain": [...], "mean_coh": ...}
    {"type": "error", "msg": ...}

Unknown fields are ignored; unknown types get an error reply. Parameter
bounds are enforced server-side before anything reaches the audio path.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import queue

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import ParamMailbox, Telemetry


def state_message(mailbox: ParamMailbox) -> dict:
    params, bypass = mailbox.peek()
    return {"type": "state", "S": params.s, "lambda": params.smoothing,
            "mu": params.mu, "g_min": params.g_min, "bypass": bypass}


def handle_message(text: str, mailbox: ParamMailbox) -> dict:
    """Apply one client message; returns the reply dict."""
    try:
        msg = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return {"type": "error", "msg": "malformed JSON"}
    if not isinstance(msg, dict):
        return {"type": "error", "msg": "message must be a JSON object"}
    mtype = msg.get("type")
    if mtype == "set_param":
        name = msg.get("name")
        value = msg.get("value")
        if not isinstance(name, str) or not isinstance(value, (int, float)) \
                or isinstance(value, bool):
            return {"type": "error", "msg": "set_param needs a name and numeric value"}
        try:
            params = mailbox.set_param(name, value)
        except KeyError:
            return {"type": "error", "msg": f"unknown parameter: {name}"}
        except ValueError as exc:
            return {"type": "error", "msg": str(exc)}
        attr = {"S": "s", "lambda": "smoothing", "mu": "mu", "g_min": "g_min"}[name]
        return {"type": "ack", "name": name, "value": getattr(params, attr)}
    if mtype == "bypass":
        on = msg.get("on")
        if not isinstance(on, bool):
            return {"type": "error", "msg": "bypass needs a boolean 'on'"}
        mailbox.set_bypass(on)
        return {"type": "ack", "name": "bypass", "value": on}
    if mtype == "get_state":
        return state_message(mailbox)
    return {"type": "error", "msg": f"unknown message type: {mtype!r}"}


def telemetry_message(t: Telemetry) -> dict:
    return {"type": "telemetry", "frame": t.frame, "band_cdr": t.band_cdr,
            "band_gain": t.band_gain, "mean_coh": t.mean_coh}


def build_app(mailbox: ParamMailbox,
              telemetry_queue: queue.Queue | None = None) -> FastAPI:
    app = FastAPI()
    clients: set[asyncio.Queue] = set()

    async def pump_telemetry():
        while True:
            try:
                while telemetry_queue is not None:
                    t = telemetry_queue.get_nowait()
                    msg = telemetry_message(t)
                    for q in list(clients):
                        if q.full():
                            with contextlib.suppress(asyncio.QueueEmpty):
                                q.get_nowait()  # drop oldest, never block
                        q.put_nowait(msg)
            except queue.Empty:
                pass
            await asyncio.sleep(0.01)

    @app.on_event("startup")
    async def start_pump():
        app.state.pump = asyncio.create_task(pump_telemetry())

    @app.on_event("shutdown")
    async def stop_pump():
        app.state.pump.cancel()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        outbox: asyncio.Queue = asyncio.Queue(maxsize=256)
        clients.add(outbox)

        async def sender():
            while True:
                msg = await outbox.get()
                await ws.send_text(json.dumps(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                text = await ws.receive_text()
                await outbox.put(handle_message(text, mailbox))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            clients.discard(outbox)

    return app


def serve(mailbox: ParamMailbox, telemetry_queue: queue.Queue,
          host: str = "127.0.0.1", port: int = 8765):
    """Blocking uvicorn server for the control endpoint."""
    import uvicorn
    app = build_app(mailbox, telemetry_queue)
    uvicorn.run(app, host=host, port=port, log_level="warning")
