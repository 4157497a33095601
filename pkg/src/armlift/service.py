"""Live steering service: a horizontal-lift integrator driven by a moving target.

The engine is deterministic: session state depends only on the sequence of
(set_target, tick) events, never on wall-clock time.  Auto-ticking (for the
browser UI) simply enqueues tick events at the configured rate, so a scripted
client that sends explicit ``tick`` frames replays identically.

Per tick the commanded target is limited to the speed cap, projected onto
the annulus bands at least ``margin`` away from every critical radius, and
the resulting straight segment is lifted with the same integrator the batch
CLI uses.  A session remembers its starting configuration; once the effector
returns to the starting point the accumulated holonomy can be snapshotted.
"""

import asyncio
import os
from dataclasses import dataclass, field

import numpy as np

from .arm import ArmSpec, Configuration, critical_radii, eval_arm, gram
from .errors import NearCritical, NotAtBasepoint
from .curves import CurveSpec, Polyline
from .fields import planar_field
from .lift import LiftOptions, lift_path
from .morse import grad_rho_b, rho_lift

__all__ = [
    "SteerSettings",
    "Session",
    "SteerEngine",
    "create_app",
    "main",
]


@dataclass(frozen=True)
class SteerSettings:
    """Service configuration; every field can come from the environment."""

    host: str = "127.0.0.1"
    port: int = 8723
    tick_rate: float = 30.0
    speed_cap: float = 1.0
    margin: float = 0.05
    step: float = 1e-3
    basepoint_eps: float = 1e-3

    @classmethod
    def from_env(cls) -> "SteerSettings":
        def get(name: str, cast, default):
            raw = os.environ.get(name)
            return default if raw is None else cast(raw)

        return cls(
            host=get("STEER_HOST", str, cls.host),
            port=get("STEER_PORT", int, cls.port),
            tick_rate=get("STEER_TICK_RATE", float, cls.tick_rate),
            speed_cap=get("STEER_SPEED_CAP", float, cls.speed_cap),
            margin=get("STEER_MARGIN", float, cls.margin),
            step=get("STEER_STEP", float, cls.step),
            basepoint_eps=get("STEER_BASEPOINT_EPS", float, cls.basepoint_eps),
        )


def _allowed_bands(spec: ArmSpec, margin: float) -> list[tuple[float, float]]:
    """Closed radius intervals reachable and at least ``margin`` from critical radii."""
    a = np.abs(spec.lengths_array)
    r_max = float(np.sum(a))
    r_min = max(0.0, 2.0 * float(np.max(a, initial=0.0)) - r_max) if spec.m else 0.0
    radii = [float(r) for r in critical_radii(spec)]
    bands: list[tuple[float, float]] = []
    cuts = sorted({r_min, r_max, *[r for r in radii if r_min <= r <= r_max]})
    lo = r_min
    for cut in cuts + [r_max]:
        if cut - margin > lo:
            start = lo + margin if any(abs(lo - r) < 1e-15 for r in radii) or lo > 0 else lo
            end = cut - margin
            if start == 0.0 and all(abs(r) > 1e-15 for r in radii) and r_min == 0.0:
                start = 0.0
            if end >= start:
                bands.append((start, end))
        lo = max(lo, cut)
    if not bands:
        raise ValueError("margin leaves no admissible radius band for this arm")
    return bands


def _project_radius(bands: list[tuple[float, float]], r: float) -> float:
    best, best_dist = bands[0][0], abs(r - bands[0][0])
    for lo, hi in bands:
        if lo <= r <= hi:
            return r
        for edge in (lo, hi):
            d = abs(r - edge)
            if d < best_dist - 1e-18:
                best, best_dist = edge, d
    return best


@dataclass
class Session:
    """One steered arm: deterministic state plus its event history."""

    id: str
    spec: ArmSpec
    q: Configuration
    t: float
    target: np.ndarray  # commanded target (raw, before clamping)
    baseline: Configuration
    baseline_point: np.ndarray
    speed_cap: float
    margin: float
    tick_rate: float
    step: float
    history: list = field(default_factory=list)
    clamped: bool = False
    tracking_error: float = 0.0
    bands: list = field(default_factory=list)

    def effector(self) -> np.ndarray:
        return eval_arm(self.spec, self.q)


class SteerEngine:
    """All sessions; pure sequential state machine, no clocks inside."""

    def __init__(self, settings: SteerSettings | None = None):
        self.settings = settings or SteerSettings()
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    # -- session lifecycle -------------------------------------------------

    def create(
        self,
        spec: ArmSpec,
        q0: Configuration,
        speed_cap: float | None = None,
        margin: float | None = None,
        tick_rate: float | None = None,
    ) -> Session:
        if spec.dim != 2:
            raise ValueError("steering is planar in this version")
        g = gram(spec, q0)
        floor = 1e-10 * spec.scale**spec.dim
        if g.det <= floor:
            raise NearCritical(
                "start configuration is aligned (singular Gram matrix)",
                det_gram=g.det,
            )
        margin_val = self.settings.margin if margin is None else float(margin)
        self._counter += 1
        sid = f"s{self._counter}"
        base_point = eval_arm(spec, q0)
        session = Session(
            id=sid,
            spec=spec,
            q=q0,
            t=0.0,
            target=base_point.copy(),
            baseline=q0,
            baseline_point=base_point.copy(),
            speed_cap=self.settings.speed_cap if speed_cap is None else float(speed_cap),
            margin=margin_val,
            tick_rate=self.settings.tick_rate if tick_rate is None else float(tick_rate),
            step=self.settings.step,
            bands=_allowed_bands(spec, margin_val),
        )
        session.history.append(base_point.copy())
        self._sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        if sid not in self._sessions:
            raise KeyError(f"no session {sid}")
        return self._sessions[sid]

    # -- steering ----------------------------------------------------------

    def set_target(self, sid: str, point) -> Session:
        session = self.get(sid)
        p = np.asarray(point, dtype=float)
        if p.shape != (2,):
            raise ValueError("target must be a planar point")
        session.target = p
        return session

    def set_tick_rate(self, sid: str, value: float) -> Session:
        session = self.get(sid)
        if value < 0:
            raise ValueError("tick rate cannot be negative")
        session.tick_rate = float(value)
        return session

    def tick(self, sid: str, dt: float) -> Session:
        session = self.get(sid)
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        start = session.effector()
        delta = session.target - start
        dist = float(np.linalg.norm(delta))
        max_move = session.speed_cap * dt
        clamped_speed = dist > max_move
        goal = start + delta * (max_move / dist) if clamped_speed else session.target

        r = float(np.linalg.norm(goal))
        r_ok = _project_radius(session.bands, r)
        clamped_radius = abs(r_ok - r) > 1e-12
        if clamped_radius:
            direction = goal / r if r > 1e-15 else _fallback_direction(start)
            goal = direction * r_ok

        moved = float(np.linalg.norm(goal - start)) > 1e-15
        if moved:
            curve = CurveSpec(
                [Polyline((tuple(start), tuple(goal)), (0.0, dt))]
            )
            traj = lift_path(
                session.spec,
                session.q,
                curve,
                LiftOptions(step=min(session.step, dt)),
            )
            session.q = traj.final_config
            session.tracking_error = float(traj.tracking_error[-1])
        session.t += dt
        session.clamped = bool(clamped_speed or clamped_radius)
        session.history.append(session.effector().copy())
        return session

    # -- reporting ---------------------------------------------------------

    def state(self, sid: str) -> dict:
        session = self.get(sid)
        spec = session.spec
        q = session.q
        det = gram(spec, q).det
        eff = session.effector()
        return {
            "type": "state",
            "session": session.id,
            "t": session.t,
            "q": [float(x) for x in q.angles],
            "effector": [float(eff[0]), float(eff[1])],
            "target": [float(x) for x in session.target],
            "det_p": float(det),
            "rho": rho_lift(q),
            "invariants": self._invariants(spec, q),
            "clamped": session.clamped,
            "tracking_error": session.tracking_error,
        }

    @staticmethod
    def _invariants(spec: ArmSpec, q: Configuration) -> dict:
        from .moebius import cross_ratio

        coincident = []
        ratios = []
        z = q.as_complex()
        for _, indices in spec.value_classes:
            idx = list(indices)
            for a_pos in range(len(idx)):
                for b_pos in range(a_pos + 1, len(idx)):
                    i, j = idx[a_pos], idx[b_pos]
                    if abs(z[i] - z[j]) <= 1e-9:
                        coincident.append([i, j])
            distinct = []
            for i in idx:
                if all(abs(z[i] - z[k]) > 1e-9 for k in distinct):
                    distinct.append(i)
            if len(distinct) >= 4:
                i, j, k, l = distinct[:4]
                ratios.append(
                    {
                        "indices": [i, j, k, l],
                        "value": cross_ratio(z[i], z[j], z[k], z[l]),
                    }
                )
        return {"coincident": coincident, "cross_ratios": ratios}

    def meta(self, sid: str) -> dict:
        session = self.get(sid)
        spec = session.spec
        return {
            "session": session.id,
            "lengths": [float(a) for a in spec.lengths],
            "dim": spec.dim,
            "critical_radii": [float(r) for r in critical_radii(spec)],
            "total_length": spec.total_length,
            "speed_cap": session.speed_cap,
            "margin": session.margin,
            "tick_rate": session.tick_rate,
            "baseline_point": [float(x) for x in session.baseline_point],
        }

    def holonomy_snapshot(self, sid: str, eps: float | None = None) -> dict:
        """Displacement relative to the session baseline, at the basepoint.

        Requires the effector to sit within ``eps`` of the baseline point.
        For equal-length arms the report carries the alignment (cosine)
        between the displacement and the fiber gradient of the angle sum at
        the baseline, the direction holonomy is predicted to follow.
        """
        session = self.get(sid)
        eps_val = self.settings.basepoint_eps if eps is None else float(eps)
        eff = session.effector()
        gap = float(np.linalg.norm(eff - session.baseline_point))
        if gap > eps_val:
            raise NotAtBasepoint(
                f"effector is {gap:.3e} from the baseline point (eps={eps_val:g})"
            )
        disp = np.asarray(session.q.angles) - np.asarray(session.baseline.angles)
        report = {
            "type": "holonomy",
            "session": session.id,
            "t": session.t,
            "displacement": [float(x) for x in disp],
            "displacement_norm": float(np.linalg.norm(disp)),
            "rho_change": rho_lift(session.q) - rho_lift(session.baseline),
            "baseline_gap": gap,
            "loop_points": len(session.history),
        }
        lengths = set(session.spec.lengths)
        if len(lengths) == 1 and 0.0 not in lengths and session.spec.m >= 3:
            try:
                grad = grad_rho_b(session.spec, session.baseline)
            except NearCritical:
                grad = None
            if grad is not None and np.linalg.norm(grad) > 0 and np.linalg.norm(disp) > 0:
                cos = float(
                    np.dot(disp, grad) / (np.linalg.norm(disp) * np.linalg.norm(grad))
                )
                report["gradient_alignment"] = cos
        basis = np.stack(
            [
                planar_field(session.spec, session.baseline.angles, "AS"),
                planar_field(session.spec, session.baseline.angles, "AC"),
                planar_field(session.spec, session.baseline.angles, "A2"),
            ],
            axis=1,
        )
        coef, _, rank, _ = np.linalg.lstsq(basis, disp, rcond=None)
        report["decomposition"] = [float(x) for x in coef]
        report["basis_rank"] = int(rank)
        return report

    def reset_baseline(self, sid: str) -> Session:
        session = self.get(sid)
        session.baseline = session.q
        session.baseline_point = session.effector().copy()
        session.history = [session.baseline_point.copy()]
        return session

    # -- snapshot / resume ---------------------------------------------------

    def serialize(self, sid: str) -> dict:
        session = self.get(sid)
        return {
            "id": session.id,
            "arm": session.spec.to_dict(),
            "t": session.t,
            "q": [float(x) for x in session.q.angles],
            "target": [float(x) for x in session.target],
            "baseline": [float(x) for x in session.baseline.angles],
            "baseline_point": [float(x) for x in session.baseline_point],
            "speed_cap": session.speed_cap,
            "margin": session.margin,
            "tick_rate": session.tick_rate,
            "step": session.step,
            "history": [[float(p[0]), float(p[1])] for p in session.history],
            "clamped": session.clamped,
            "tracking_error": session.tracking_error,
        }

    def resume(self, snapshot: dict) -> Session:
        spec = ArmSpec.from_dict(snapshot["arm"])
        self._counter += 1
        sid = f"s{self._counter}"
        session = Session(
            id=sid,
            spec=spec,
            q=Configuration.from_angles(snapshot["q"]),
            t=float(snapshot["t"]),
            target=np.asarray(snapshot["target"], dtype=float),
            baseline=Configuration.from_angles(snapshot["baseline"]),
            baseline_point=np.asarray(snapshot["baseline_point"], dtype=float),
            speed_cap=float(snapshot["speed_cap"]),
            margin=float(snapshot["margin"]),
            tick_rate=float(snapshot["tick_rate"]),
            step=float(snapshot["step"]),
            history=[np.asarray(p, dtype=float) for p in snapshot["history"]],
            clamped=bool(snapshot["clamped"]),
            tracking_error=float(snapshot["tracking_error"]),
            bands=_allowed_bands(spec, float(snapshot["margin"])),
        )
        self._sessions[sid] = session
        return session


def _fallback_direction(start: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(start))
    if r > 1e-15:
        return start / r
    return np.array([1.0, 0.0])


# ---------------------------------------------------------------------------
# HTTP / WebSocket transport
# ---------------------------------------------------------------------------


def create_app(settings: SteerSettings | None = None):
    from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

    settings = settings or SteerSettings.from_env()
    engine = SteerEngine(settings)
    app = FastAPI(title="armlift steering service")
    app.state.engine = engine
    locks: dict[str, asyncio.Lock] = {}

    def lock_for(sid: str) -> asyncio.Lock:
        return locks.setdefault(sid, asyncio.Lock())

    def parse_create(body: dict):
        spec = ArmSpec.from_dict(body["arm"] if "arm" in body else body)
        q0 = Configuration.from_dict(body["q0"], dim=spec.dim)
        return spec, q0, body

    @app.post("/sessions")
    async def create_session(body: dict):
        try:
            spec, q0, raw = parse_create(body)
            session = engine.create(
                spec,
                q0,
                speed_cap=raw.get("speed_cap"),
                margin=raw.get("margin"),
                tick_rate=raw.get("tick_rate"),
            )
        except NearCritical as err:
            raise HTTPException(status_code=409, detail=str(err))
        except (KeyError, ValueError) as err:
            raise HTTPException(status_code=422, detail=str(err))
        return {
            "id": session.id,
            "state": engine.state(session.id),
            "meta": engine.meta(session.id),
        }

    def _session_or_404(sid: str) -> None:
        try:
            engine.get(sid)
        except KeyError as err:
            raise HTTPException(status_code=404, detail=str(err))

    @app.get("/sessions/{sid}/state")
    async def get_state(sid: str):
        _session_or_404(sid)
        return engine.state(sid)

    @app.get("/sessions/{sid}/meta")
    async def get_meta(sid: str):
        _session_or_404(sid)
        return engine.meta(sid)

    @app.post("/sessions/{sid}/target")
    async def post_target(sid: str, body: dict):
        _session_or_404(sid)
        async with lock_for(sid):
            try:
                engine.set_target(sid, body["point"])
            except (KeyError, ValueError) as err:
                raise HTTPException(status_code=422, detail=str(err))
            return engine.state(sid)

    @app.post("/sessions/{sid}/tick")
    async def post_tick(sid: str, body: dict):
        _session_or_404(sid)
        async with lock_for(sid):
            try:
                engine.tick(sid, float(body.get("dt", 1.0 / max(settings.tick_rate, 1.0))))
            except ValueError as err:
                raise HTTPException(status_code=422, detail=str(err))
            return engine.state(sid)

    @app.get("/sessions/{sid}/holonomy")
    async def get_holonomy(sid: str):
        _session_or_404(sid)
        try:
            return engine.holonomy_snapshot(sid)
        except NotAtBasepoint as err:
            raise HTTPException(status_code=409, detail=str(err))

    @app.post("/sessions/{sid}/baseline")
    async def post_baseline(sid: str):
        _session_or_404(sid)
        async with lock_for(sid):
            engine.reset_baseline(sid)
            return engine.state(sid)

    @app.post("/sessions/{sid}/snapshot")
    async def post_snapshot(sid: str):
        _session_or_404(sid)
        return engine.serialize(sid)

    @app.post("/sessions/resume")
    async def post_resume(body: dict):
        try:
            session = engine.resume(body)
        except (KeyError, ValueError) as err:
            raise HTTPException(status_code=422, detail=str(err))
        return {"id": session.id, "state": engine.state(session.id)}

    async def frame_loop(ws, sid_holder: list):
        """Shared WS message pump; fills sid_holder[0] after create/attach."""

        async def run_ticker():
            while True:
                sid = sid_holder[0]
                rate = engine.get(sid).tick_rate if sid else 0.0
                if not sid or rate <= 0:
                    await asyncio.sleep(0.05)
                    continue
                await asyncio.sleep(1.0 / rate)
                sid = sid_holder[0]
                if sid and engine.get(sid).tick_rate > 0:
                    async with lock_for(sid):
                        engine.tick(sid, 1.0 / engine.get(sid).tick_rate)
                        await ws.send_json(engine.state(sid))

        ticker = asyncio.create_task(run_ticker())
        try:
            while True:
                frame = await ws.receive_json()
                kind = frame.get("type")
                try:
                    if kind == "create":
                        spec, q0, raw = parse_create(frame)
                        session = engine.create(
                            spec,
                            q0,
                            speed_cap=raw.get("speed_cap"),
                            margin=raw.get("margin"),
                            tick_rate=raw.get("tick_rate"),
                        )
                        sid_holder[0] = session.id
                        await ws.send_json(
                            {
                                "type": "created",
                                "id": session.id,
                                "state": engine.state(session.id),
                                "meta": engine.meta(session.id),
                            }
                        )
                    elif kind == "attach":
                        engine.get(frame["id"])
                        sid_holder[0] = frame["id"]
                        await ws.send_json(engine.state(frame["id"]))
                    elif kind == "set_target":
                        sid = _require(sid_holder)
                        async with lock_for(sid):
                            engine.set_target(sid, frame["point"])
                            await ws.send_json(engine.state(sid))
                    elif kind == "tick":
                        sid = _require(sid_holder)
                        async with lock_for(sid):
                            engine.tick(sid, float(frame.get("dt", 1.0 / 30.0)))
                            await ws.send_json(engine.state(sid))
                    elif kind == "tick_rate":
                        sid = _require(sid_holder)
                        engine.set_tick_rate(sid, float(frame["value"]))
                        await ws.send_json(engine.state(sid))
                    elif kind == "snapshot_request":
                        sid = _require(sid_holder)
                        await ws.send_json(engine.holonomy_snapshot(sid))
                    elif kind == "baseline_reset":
                        sid = _require(sid_holder)
                        async with lock_for(sid):
                            engine.reset_baseline(sid)
                            await ws.send_json(engine.state(sid))
                    else:
                        await ws.send_json(
                            {"type": "error", "message": f"unknown frame type {kind!r}"}
                        )
                except NotAtBasepoint as err:
                    await ws.send_json(
                        {"type": "error", "error": "NotAtBasepoint", "message": str(err)}
                    )
                except NearCritical as err:
                    await ws.send_json(
                        {"type": "error", "error": "NearCritical", "message": str(err)}
                    )
                except (KeyError, ValueError) as err:
                    await ws.send_json({"type": "error", "message": str(err)})
        finally:
            ticker.cancel()

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        holder: list = [None]
        try:
            await frame_loop(ws, holder)
        except WebSocketDisconnect:
            pass

    @app.websocket("/sessions/{sid}/stream")
    async def session_stream(ws: WebSocket, sid: str):
        await ws.accept()
        try:
            engine.get(sid)
        except KeyError:
            await ws.send_json({"type": "error", "message": f"no session {sid}"})
            await ws.close()
            return
        holder: list = [sid]
        await ws.send_json(engine.state(sid))
        try:
            await frame_loop(ws, holder)
        except WebSocketDisconnect:
            pass

    return app


def _require(holder: list) -> str:
    if not holder[0]:
        raise ValueError("no session bound to this connection; send create or attach")
    return holder[0]


def main(argv=None) -> int:
    import uvicorn

    settings = SteerSettings.from_env()
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
