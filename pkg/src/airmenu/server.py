"""WebSocket broadcast of live pipeline state, plus the tuning intake.

Per processed frame every client receives one text message (the snapshot
JSON) and one binary message (b"FRME" + big-endian u32 width, height,
frame_seq + raw RGB bytes of the overlay frame), always as an adjacent
pair. Each client has a bounded queue of 8 pairs with drop-oldest, so a
stalled client can never back-pressure the frame loop. Clients may send
{"set": {...}} with a live-tunable config subset; valid requests are queued
and applied by the pipeline at the next frame boundary.
"""

from __future__ import annotations

import asyncio
import json
import logging
import struct
import threading
from collections import deque
from typing import Optional

from websockets.asyncio.server import serve

from .config import validate_updates
from .frame import Frame
from .pipeline import StateSnapshot

log = logging.getLogger(__name__)

FRAME_MAGIC = b"FRME"
CLIENT_QUEUE_PAIRS = 8


def pack_frame_message(frame: Frame, frame_seq: int) -> bytes:
    return FRAME_MAGIC + struct.pack(">III", frame.width, frame.height, frame_seq) + frame.pixels.tobytes()


class _Client:
    def __init__(self):
        self.pairs: deque = deque(maxlen=CLIENT_QUEUE_PAIRS)  # drop-oldest
        self.replies: deque = deque()
        self.wake = asyncio.Event()


class StateServer:
    """Runs the broadcast endpoint on its own thread with its own event loop."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.host = host
        self.port = port  # resolved to the bound port after start()
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._clients: set[_Client] = set()
        self._last_pair: Optional[tuple[str, bytes]] = None
        self._pending: list[dict] = []
        self._pending_lock = threading.Lock()
        self._ready = threading.Event()
        self._stop: Optional[asyncio.Future] = None
        self._thread: Optional[threading.Thread] = None
        self._startup_error: Optional[BaseException] = None

    @classmethod
    def from_address(cls, address: str) -> "StateServer":
        host, _, port = address.rpartition(":")
        return cls(host, int(port))

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "StateServer":
        self._thread = threading.Thread(target=self._run, name="state-server", daemon=True)
        self._thread.start()
        self._ready.wait(timeout=10.0)
        if self._startup_error is not None:
            raise RuntimeError(f"state server failed to start: {self._startup_error}")
        if not self._ready.is_set():
            raise RuntimeError("state server did not start in time")
        log.info("state server listening on ws://%s:%d", self.host, self.port)
        return self

    def _run(self) -> None:
        try:
            asyncio.run(self._main())
        except BaseException as exc:
            self._startup_error = exc
            self._ready.set()

    async def _main(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._stop = self._loop.create_future()
        async with serve(self._handle, self.host, self.port) as server:
            self.port = server.sockets[0].getsockname()[1]
            self._ready.set()
            await self._stop

    def stop(self) -> None:
        if self._loop is not None and self._stop is not None:
            def _finish():
                if not self._stop.done():
                    self._stop.set_result(None)
            self._loop.call_soon_threadsafe(_finish)
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    # -- pipeline side -------------------------------------------------------

    def publish(self, snapshot: StateSnapshot, overlay: Frame) -> None:
        """Hand one frame's state to the broadcaster; never blocks."""
        if self._loop is None:
            return
        pair = (snapshot.to_json(), pack_frame_message(overlay, snapshot.frame_seq))
        try:
            self._loop.call_soon_threadsafe(self._fan_out, pair)
        except RuntimeError:
            pass  # loop already closed during shutdown

    def poll_updates(self) -> list[dict]:
        """Validated set-requests accumulated since the last poll."""
        with self._pending_lock:
            updates, self._pending = self._pending, []
        return updates

    # -- event-loop side -----------------------------------------------------

    def _fan_out(self, pair: tuple[str, bytes]) -> None:
        self._last_pair = pair
        for client in self._clients:
            client.pairs.append(pair)
            client.wake.set()

    async def _handle(self, ws) -> None:
        client = _Client()
        if self._last_pair is not None:
            client.pairs.append(self._last_pair)
            client.wake.set()
        self._clients.add(client)
        sender = asyncio.ensure_future(self._send_loop(ws, client))
        try:
            async for message in ws:
                if isinstance(message, (bytes, bytearray)):
                    continue  # clients have nothing binary to say
                client.replies.append(self._handle_request(message))
                client.wake.set()
        except Exception:
            pass
        finally:
            self._clients.discard(client)
            sender.cancel()

    async def _send_loop(self, ws, client: _Client) -> None:
        while True:
            await client.wake.wait()
            client.wake.clear()
            while client.replies or client.pairs:
                while client.replies:
                    await ws.send(client.replies.popleft())
                if client.pairs:
                    text, blob = client.pairs.popleft()
                    await ws.send(text)
                    await ws.send(blob)

    def _handle_request(self, message: str) -> str:
        try:
            obj = json.loads(message)
        except ValueError:
            return json.dumps({"ok": False, "error": "request is not JSON"})
        if not isinstance(obj, dict) or set(obj) != {"set"}:
            return json.dumps({"ok": False, "error": 'request must be {"set": {...}}'})
        error = validate_updates(obj["set"])
        if error is not None:
            return json.dumps({"ok": False, "error": error})
        with self._pending_lock:
            self._pending.append(obj["set"])
        return json.dumps({"ok": True})
