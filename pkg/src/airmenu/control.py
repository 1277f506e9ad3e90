"""Media-player control over a local stream socket.

The wire protocol is newline-delimited JSON, one command per line:

    {"action":"play_pause","seq":1}\n

and one reply per command:

    {"seq":1,"ok":true}\n

Sequence numbers strictly increase within a connection (including across the
single automatic reconnect), so acks can be matched without ambiguity. Any
real player can be bridged by a thin adapter speaking this protocol; the
bundled MockPlayer is the test double.
"""

from __future__ import annotations

import json
import logging
import os
import socket
import threading
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

log = logging.getLogger(__name__)

REPLY_TIMEOUT_S = 0.5


class PlayerAction(Enum):
    """The seven media-player actions; values are the wire names."""

    PLAY_PAUSE = "play_pause"
    STOP = "stop"
    NEXT = "next"
    PREV = "prev"
    VOL_UP = "vol_up"
    VOL_DOWN = "vol_down"
    MUTE = "mute"


_ACTION_BY_NAME = {a.value: a for a in PlayerAction}


class TransportError(Exception):
    """The player socket is gone and one reconnect attempt did not help."""


class ProtocolError(Exception):
    """The peer sent a line that is not valid protocol."""

    def __init__(self, message: str, raw: bytes = b""):
        super().__init__(f"{message}: {raw!r}" if raw else message)
        self.raw = raw


@dataclass(frozen=True)
class CommandRecord:
    action: PlayerAction
    sent_at_ms: float
    acked: bool
    seq: int


def encode_command(action: PlayerAction, seq: int) -> bytes:
    """One command line: UTF-8 JSON object terminated by a newline."""
    return json.dumps({"action": action.value, "seq": seq}, separators=(",", ":")).encode() + b"\n"


def parse_command(line: bytes) -> tuple[PlayerAction, int]:
    """Inverse of encode_command; raises ProtocolError on anything else."""
    try:
        obj = json.loads(line)
    except ValueError:
        raise ProtocolError("command line is not JSON", line) from None
    if not isinstance(obj, dict) or set(obj) != {"action", "seq"}:
        raise ProtocolError("command must be {action, seq}", line)
    action = _ACTION_BY_NAME.get(obj["action"])
    if action is None:
        raise ProtocolError(f"unknown action {obj['action']!r}", line)
    seq = obj["seq"]
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise ProtocolError("seq must be an integer", line)
    return action, seq


def _encode_reply(seq: int, ok: bool) -> bytes:
    return json.dumps({"seq": seq, "ok": ok}, separators=(",", ":")).encode() + b"\n"


def _connect_unix(path: str, timeout: float) -> socket.socket:
    if not hasattr(socket, "AF_UNIX"):
        raise TransportError("local stream sockets are not supported on this platform")
    sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
    sock.settimeout(timeout)
    try:
        sock.connect(path)
    except OSError as exc:
        sock.close()
        raise TransportError(f"cannot connect to player socket {path}: {exc}") from exc
    return sock


def _read_line(sock: socket.socket, buf: bytearray) -> Optional[bytes]:
    """One newline-terminated line, or None on timeout. b'' from recv = EOF."""
    while True:
        nl = buf.find(b"\n")
        if nl >= 0:
            line = bytes(buf[: nl + 1])
            del buf[: nl + 1]
            return line
        try:
            chunk = sock.recv(4096)
        except socket.timeout:
            return None
        if not chunk:
            raise ConnectionResetError("player closed the connection")
        buf.extend(chunk)


class PlayerLink:
    """Client side of the control protocol, one socket, one seq counter."""

    def __init__(self, socket_path: str, timeout_s: float = REPLY_TIMEOUT_S):
        self.socket_path = socket_path
        self.timeout_s = timeout_s
        self._sock: Optional[socket.socket] = None
        self._buf = bytearray()
        self._seq = 0
        self._t0 = time.monotonic()

    def connect(self) -> None:
        if self._sock is None:
            self._sock = _connect_unix(self.socket_path, self.timeout_s)
            self._buf.clear()

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def _now_ms(self) -> float:
        return (time.monotonic() - self._t0) * 1000.0

    def dispatch(self, action: PlayerAction) -> CommandRecord:
        """Send one command and wait for its ack.

        A timeout yields an unacked record (the pipeline keeps going); a dead
        connection is retried once with a fresh seq, then raises
        TransportError. A malformed or mismatched reply raises ProtocolError.
        """
        self.connect()
        for attempt in (0, 1):
            self._seq += 1
            seq = self._seq
            sent_at = self._now_ms()
            try:
                self._sock.sendall(encode_command(action, seq))
                line = _read_line(self._sock, self._buf)
            except (ConnectionError, BrokenPipeError, OSError) as exc:
                self.close()
                if attempt == 0:
                    log.warning("player connection lost (%s), reconnecting once", exc)
                    self.connect()
                    continue
                raise TransportError(f"player connection lost twice: {exc}") from exc
            if line is None:
                log.warning("no reply for %s (seq %d) within %.0f ms", action.value, seq, self.timeout_s * 1000)
                return CommandRecord(action, sent_at, acked=False, seq=seq)
            return CommandRecord(action, sent_at, acked=self._check_reply(line, seq), seq=seq)
        raise AssertionError("unreachable")

    @staticmethod
    def _check_reply(line: bytes, seq: int) -> bool:
        try:
            obj = json.loads(line)
        except ValueError:
            raise ProtocolError("reply is not JSON", line) from None
        if not isinstance(obj, dict) or not isinstance(obj.get("seq"), int) or not isinstance(obj.get("ok"), bool):
            raise ProtocolError("reply must be {seq, ok}", line)
        if obj["seq"] != seq:
            raise ProtocolError(f"reply seq {obj['seq']} does not match command seq {seq}", line)
        return obj["ok"]


class MockPlayer:
    """A stand-in media player listening on a local socket.

    Accepts one connection at a time, acks every well-formed command, and
    records the actions in arrival order. Fault injection: drop_replies
    swallows acks (for timeout paths), close_after_replies kills the
    connection after that many acks (for reconnect paths). Malformed lines
    are answered with ok:false and recorded as protocol violations.
    """

    def __init__(
        self,
        socket_path: str,
        *,
        drop_replies: bool = False,
        close_after_replies: Optional[int] = None,
    ):
        self.socket_path = socket_path
        self.drop_replies = drop_replies
        self.close_after_replies = close_after_replies
        self._records: list[tuple[str, float]] = []
        self.violations: list[bytes] = []
        self._lock = threading.Lock()
        self._stopping = False
        if os.path.exists(socket_path):
            os.unlink(socket_path)
        if not hasattr(socket, "AF_UNIX"):
            raise TransportError("local stream sockets are not supported on this platform")
        self._server = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        self._server.bind(socket_path)
        self._server.listen(1)
        self._server.settimeout(0.1)
        self._thread = threading.Thread(target=self._serve, name="mock-player", daemon=True)
        self._thread.start()

    @property
    def actions(self) -> list[str]:
        with self._lock:
            return [name for name, _ in self._records]

    @property
    def records(self) -> list[tuple[str, float]]:
        with self._lock:
            return list(self._records)

    def _serve(self) -> None:
        while not self._stopping:
            try:
                conn, _ = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            with conn:
                self._serve_connection(conn)

    def _serve_connection(self, conn: socket.socket) -> None:
        conn.settimeout(0.1)
        buf = bytearray()
        replies = 0
        while not self._stopping:
            try:
                line = _read_line(conn, buf)
            except (ConnectionError, OSError):
                return
            if line is None:
                continue
            try:
                action, seq = parse_command(line)
                with self._lock:
                    self._records.append((action.value, time.monotonic()))
                reply = _encode_reply(seq, True)
            except ProtocolError:
                with self._lock:
                    self.violations.append(line)
                seq = self._salvage_seq(line)
                reply = _encode_reply(seq, False)
            if self.drop_replies:
                continue
            try:
                conn.sendall(reply)
            except (ConnectionError, OSError):
                return
            replies += 1
            if self.close_after_replies is not None and replies >= self.close_after_replies:
                return

    @staticmethod
    def _salvage_seq(line: bytes) -> int:
        try:
            obj = json.loads(line)
            if isinstance(obj, dict) and isinstance(obj.get("seq"), int):
                return obj["seq"]
        except ValueError:
            pass
        return 0

    def close(self) -> None:
        self._stopping = True
        self._server.close()
        self._thread.join(timeout=2.0)
        if os.path.exists(self.socket_path):
            os.unlink(self.socket_path)

    def __enter__(self) -> "MockPlayer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
