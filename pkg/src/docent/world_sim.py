"""Deterministic gallery simulation: robot base and servo kinematics, camera
and depth sensing oracles, occupancy maps, exhibit registration, and a
parametric visitor whose gaze reacts to deictic cues or falls back to
label-by-label search.

One seeded generator per concern keeps (world, plan, condition, seed) fully
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .errors import NoDepthError, WorldFileError
from .geometry import (
    FREE,
    OCCUPIED,
    UNKNOWN,
    CameraModel,
    OccupancyGrid,
    exhibit_centroid,
    plane_normal_svd,
)
from .tour_model import Exhibit


def wrap_angle(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


# ---------------------------------------------------------------------------
# Wall frame


@dataclass(frozen=True)
class WallFrame:
    """2D chart on the exhibit wall: u along the wall, v up, meters."""

    origin: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    normal: np.ndarray
    u_range: tuple[float, float]
    v_range: tuple[float, float]

    def to_wall(self, point) -> tuple[float, float]:
        d = np.asarray(point, dtype=float) - self.origin
        return float(d @ self.u_axis), float(d @ self.v_axis)

    def from_wall(self, u: float, v: float) -> np.ndarray:
        return self.origin + u * self.u_axis + v * self.v_axis

    def contains(self, u: float, v: float) -> bool:
        return self.u_range[0] <= u <= self.u_range[1] and self.v_range[0] <= v <= self.v_range[1]

    def intersect_ray(self, eye, direction):
        """(u, v) where the ray eye + s*direction (s > 0) meets the plane."""
        e = np.asarray(eye, dtype=float)
        d = np.asarray(direction, dtype=float)
        denom = float(d @ self.normal)
        if abs(denom) < 1e-9:
            return None
        s = float((self.origin - e) @ self.normal) / denom
        if s <= 0:
            return None
        return self.to_wall(e + s * d)


def exhibit_wall_box(ex: Exhibit, wall: WallFrame) -> tuple[float, float, float, float]:
    u, v = wall.to_wall(ex.center)
    return (u - ex.width / 2, v - ex.height / 2, u + ex.width / 2, v + ex.height / 2)


def label_wall_box(ex: Exhibit) -> tuple[float, float, float, float] | None:
    lb = ex.label_box
    if lb is None:
        return None
    return (lb.u - lb.width / 2, lb.v - lb.height / 2, lb.u + lb.width / 2, lb.v + lb.height / 2)


# ---------------------------------------------------------------------------
# World model


@dataclass
class RobotState:
    x: float
    y: float
    theta: float
    head_yaw: float = 0.0
    head_pitch: float = 0.0
    laser_yaw: float = 0.0
    laser_pitch: float = 0.0


@dataclass
class VisitorState:
    x: float
    y: float
    face_height: float = 1.6
    face_visible: bool = True
    walk_target: tuple[float, float] | None = None

    @property
    def face_point(self) -> np.ndarray:
        return np.array([self.x, self.y, self.face_height])


@dataclass
class WorldModel:
    exhibits: dict[str, Exhibit]
    wall: WallFrame
    static_grid: OccupancyGrid
    robot: RobotState
    visitor: VisitorState
    cfg: SimConfig
    t: float = 0.0
    path: list[tuple[float, float]] = field(default_factory=list)
    path_heading: float | None = None
    path_done: bool = True

    def clone(self) -> "WorldModel":
        return WorldModel(
            exhibits=self.exhibits,
            wall=self.wall,
            static_grid=self.static_grid,
            robot=RobotState(**vars(self.robot)),
            visitor=VisitorState(**vars(self.visitor)),
            cfg=self.cfg,
            t=self.t,
        )

    def set_path(self, waypoints: list[tuple[float, float]], final_heading: float) -> None:
        self.path = list(waypoints)
        self.path_heading = final_heading
        self.path_done = False


def build_world(exhibits: dict[str, Exhibit], cfg: SimConfig | None = None) -> WorldModel:
    """Assemble the simulation world from a set of wall exhibits.

    The wall plane comes from the exhibits themselves (they must be coplanar
    within 1e-6 m); the static occupancy grid covers the room with the wall
    band and the outer boundary occupied.
    """
    cfg = cfg or SimConfig()
    if not exhibits:
        raise WorldFileError("world has no exhibits")
    items = list(exhibits.values())
    normal = np.asarray(items[0].normal, dtype=float)
    anchor = np.asarray(items[0].center, dtype=float)
    origin = anchor - (anchor @ normal) * normal
    for ex in items:
        off = abs((np.asarray(ex.center) - origin) @ normal)
        if off > 1e-6:
            raise WorldFileError(f"exhibit {ex.id!r} lies {off:.2e} m off the wall plane")
    u_axis = np.cross(normal, np.array([0.0, 0.0, 1.0]))
    if np.linalg.norm(u_axis) < 1e-9:
        raise WorldFileError("wall must be vertical")
    u_axis = u_axis / np.linalg.norm(u_axis)
    v_axis = np.cross(u_axis, normal)

    probe = WallFrame(origin, u_axis, v_axis, normal, (0, 0), (0, 0))
    us, vs = [], []
    for ex in items:
        u0, v0, u1, v1 = exhibit_wall_box(ex, probe)
        us += [u0, u1]
        vs += [v0, v1]
        lb = label_wall_box(ex)
        if lb is not None:
            us += [lb[0], lb[2]]
            vs += [lb[1], lb[3]]
    wall = WallFrame(
        origin,
        u_axis,
        v_axis,
        normal,
        (min(us) - cfg.wall_margin_m, max(us) + cfg.wall_margin_m),
        (max(0.0, min(vs) - cfg.wall_margin_m / 2), max(vs) + 0.5),
    )

    start = cfg.start_pose
    res = cfg.grid_resolution_m
    x0 = min(wall.u_range[0], start[0]) - 1.0
    x1 = max(wall.u_range[1], start[0]) + 1.0
    y0, y1 = -0.3, cfg.room_depth_m
    cols = int(math.ceil((x1 - x0) / res))
    rows = int(math.ceil((y1 - y0) / res))
    cells = np.full((rows, cols), FREE, dtype=np.int8)
    wall_rows = int(math.ceil((cfg.wall_inflate_m - y0) / res))
    cells[:wall_rows, :] = OCCUPIED
    cells[0, :] = OCCUPIED
    cells[-1, :] = OCCUPIED
    cells[:, 0] = OCCUPIED
    cells[:, -1] = OCCUPIED
    grid = OccupancyGrid(origin=np.array([x0, y0]), resolution=res, cells=cells)

    robot = RobotState(x=start[0], y=start[1], theta=start[2])
    visitor = VisitorState(x=start[0] + 0.8, y=start[1] + 0.6, face_height=cfg.visitor_face_height_m)
    return WorldModel(exhibits=exhibits, wall=wall, static_grid=grid, robot=robot, visitor=visitor, cfg=cfg)


def viewing_spot(ex: Exhibit, cfg: SimConfig) -> tuple[float, float]:
    """Where the visitor stands at an exhibit's stop (the robot faces them)."""
    x, y, heading = ex.nav_point
    return (x + cfg.visitor_standoff_m * math.cos(heading), y + cfg.visitor_standoff_m * math.sin(heading))


def stop_salience_order(exhibits: dict[str, Exhibit], nav_point_id: str) -> list[str]:
    """Exhibits sharing a stop, largest wall area first (stable tie on id)."""
    anchor = exhibits[nav_point_id].nav_point
    same = [
        ex
        for ex in exhibits.values()
        if abs(ex.nav_point[0] - anchor[0]) < 1e-6 and abs(ex.nav_point[1] - anchor[1]) < 1e-6
    ]
    return [e.id for e in sorted(same, key=lambda e: (-e.area, e.id))]


# ---------------------------------------------------------------------------
# Kinematic stepping


def _slew(current: float, target: float, max_step: float) -> float:
    delta = target - current
    if abs(delta) <= max_step:
        return target
    return current + math.copysign(max_step, delta)


def step(world: WorldModel, dt: float, head_cmd=None, laser_cmd=None) -> WorldModel:
    """Advance one tick: servo slew, waypoint following, visitor walking.

    The base rotates in place toward the next waypoint before translating at
    the configured speed; the final waypoint also aligns the heading.
    """
    cfg = world.cfg
    r = world.robot
    servo_step = cfg.servo_slew_radps * dt
    if head_cmd is not None:
        r.head_yaw = _slew(r.head_yaw, head_cmd[0], servo_step)
        r.head_pitch = _slew(r.head_pitch, head_cmd[1], servo_step)
    if laser_cmd is not None:
        r.laser_yaw = _slew(r.laser_yaw, laser_cmd[0], servo_step)
        r.laser_pitch = _slew(r.laser_pitch, laser_cmd[1], servo_step)

    if not world.path_done:
        turn_step = cfg.turn_rate_radps * dt
        while world.path:
            tx, ty = world.path[0]
            dist = math.hypot(tx - r.x, ty - r.y)
            if dist <= cfg.arrive_tol_m:
                world.path.pop(0)
                continue
            desired = math.atan2(ty - r.y, tx - r.x)
            err = wrap_angle(desired - r.theta)
            if abs(err) > 0.05:
                r.theta = wrap_angle(r.theta + max(-turn_step, min(turn_step, err)))
            else:
                r.theta = desired
                advance = min(cfg.base_speed_mps * dt, dist)
                r.x += advance * math.cos(desired)
                r.y += advance * math.sin(desired)
            break
        if not world.path:
            err = wrap_angle((world.path_heading or r.theta) - r.theta)
            if abs(err) <= cfg.heading_tol_rad:
                if world.path_heading is not None:
                    r.theta = world.path_heading
                world.path_done = True
            else:
                r.theta = wrap_angle(r.theta + max(-turn_step, min(turn_step, err)))

    vis = world.visitor
    if vis.walk_target is not None:
        tx, ty = vis.walk_target
        dist = math.hypot(tx - vis.x, ty - vis.y)
        stride = cfg.visitor_walk_speed_mps * dt
        if dist <= stride:
            vis.x, vis.y = tx, ty
            vis.walk_target = None
        else:
            vis.x += stride * (tx - vis.x) / dist
            vis.y += stride * (ty - vis.y) / dist

    world.t += dt
    return world


# ---------------------------------------------------------------------------
# Sensing oracles


def _head_rotation(world: WorldModel) -> np.ndarray:
    """Camera-to-world rotation for the current base heading and head angles."""
    r = world.robot
    yaw = r.theta + r.head_yaw
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(r.head_pitch), math.sin(r.head_pitch)
    forward = np.array([cp * cy, cp * sy, sp])
    left = np.array([-sy, cy, 0.0])
    up = np.cross(forward, -left)
    # Camera axes: x image-right, y image-down, z optical.
    return np.column_stack([-left, -up, forward])


def camera_model(world: WorldModel) -> CameraModel:
    cfg = world.cfg
    fx = (cfg.cam_width_px / 2) / math.tan(math.radians(cfg.cam_hfov_deg) / 2)
    fy = (cfg.cam_height_px / 2) / math.tan(math.radians(cfg.cam_vfov_deg) / 2)
    pivot = np.array([world.robot.x, world.robot.y, cfg.head_pivot_height_m])
    return CameraModel(
        fx=fx,
        fy=fy,
        cx=cfg.cam_width_px / 2,
        cy=cfg.cam_height_px / 2,
        width=cfg.cam_width_px,
        height=cfg.cam_height_px,
        rotation=_head_rotation(world),
        translation=pivot,
    )


def in_fov(world: WorldModel, point, camera: CameraModel | None = None) -> bool:
    cam = camera or camera_model(world)
    p = cam.rotation.T @ (np.asarray(point, dtype=float) - cam.translation)
    if p[2] < 0.1:
        return False
    cfg = world.cfg
    return (
        abs(math.atan2(p[0], p[2])) <= math.radians(cfg.cam_hfov_deg) / 2
        and abs(math.atan2(p[1], p[2])) <= math.radians(cfg.cam_vfov_deg) / 2
    )


def face_measurement(world: WorldModel, rng: np.random.Generator, noise: bool = True):
    """Noisy 3D face position, or None when hidden or outside the FOV."""
    if not world.visitor.face_visible:
        return None
    face = world.visitor.face_point
    if not in_fov(world, face):
        return None
    if noise:
        return face + rng.normal(0.0, world.cfg.face_noise_m, 3)
    return face.copy()


def detect_exhibit_bbox(world: WorldModel, ex: Exhibit, rng: np.random.Generator, noise: bool = True):
    """Pixel bbox of an exhibit in the head camera, or None when out of view."""
    cam = camera_model(world)
    center = np.asarray(ex.center, dtype=float)
    if not in_fov(world, center, cam):
        return None
    u_c, v_c = world.wall.to_wall(center)
    corners = [
        world.wall.from_wall(u_c + su * ex.width / 2, v_c + sv * ex.height / 2)
        for su in (-1, 1)
        for sv in (-1, 1)
    ]
    us, vs = [], []
    for corner in corners:
        u, v, d = cam.project(corner)
        if d <= 0:
            return None
        us.append(u)
        vs.append(v)
    u0, u1 = int(round(min(us))), int(round(max(us)))
    v0, v1 = int(round(min(vs))), int(round(max(vs)))
    if noise and world.cfg.bbox_jitter_px > 0:
        j = world.cfg.bbox_jitter_px
        u0 += int(rng.integers(-j, j + 1))
        u1 += int(rng.integers(-j, j + 1))
        v0 += int(rng.integers(-j, j + 1))
        v1 += int(rng.integers(-j, j + 1))
    u0 = max(0, min(u0, cam.width - 1))
    u1 = max(u0, min(u1, cam.width - 1))
    v0 = max(0, min(v0, cam.height - 1))
    v1 = max(v0, min(v1, cam.height - 1))
    return (u0, v0, u1, v1)


def depth_patch(world: WorldModel, bbox, rng: np.random.Generator, noise: bool = True, stride: int = 1) -> np.ndarray:
    """Wall-plane z-depths for every pixel of ``bbox`` (NaN where the ray
    misses the wall)."""
    cam = camera_model(world)
    u0, v0, u1, v1 = bbox
    us = np.arange(u0, u1 + 1)
    vs = np.arange(v0, v1 + 1)
    uu, vv = np.meshgrid(us, vs)
    dirs_cam = np.stack(
        [(uu - cam.cx) / cam.fx, (vv - cam.cy) / cam.fy, np.ones_like(uu, dtype=float)], axis=-1
    )
    dirs_world = dirs_cam @ cam.rotation.T
    denom = dirs_world @ world.wall.normal
    numer = float((world.wall.origin - cam.translation) @ world.wall.normal)
    with np.errstate(divide="ignore", invalid="ignore"):
        depth = numer / denom
    depth = np.where((np.abs(denom) > 1e-9) & (depth > 0), depth, np.nan)
    if noise and world.cfg.depth_noise_m > 0:
        depth = depth + rng.normal(0.0, world.cfg.depth_noise_m, depth.shape)
    if stride > 1:
        depth = depth.copy()
        mask = np.ones_like(depth, dtype=bool)
        mask[::stride, ::stride] = False
        depth[mask] = np.nan
    return depth


def ground_exhibit(world: WorldModel, ex: Exhibit, rng: np.random.Generator, noise: bool = True):
    """Detect-and-localize one exhibit with the head camera.

    Returns (centroid, normal) in the world frame or None when the exhibit is
    out of view. The centroid is the mean back-projection of the bbox depth
    pixels; the normal comes from an SVD plane fit of the same patch, signed
    toward the robot.
    """
    bbox = detect_exhibit_bbox(world, ex, rng, noise=noise)
    if bbox is None:
        return None
    cam = camera_model(world)
    # Subsample large patches: the plane fit does not need every pixel.
    span = max(bbox[2] - bbox[0], bbox[3] - bbox[1])
    stride = max(1, span // 16)
    depth = depth_patch(world, bbox, rng, noise=noise, stride=stride)
    try:
        centroid = exhibit_centroid(depth, bbox, cam)
    except NoDepthError:
        return None
    vv, uu = np.nonzero(np.isfinite(depth) & (depth > 0))
    d = depth[vv, uu]
    pts_cam = np.stack(
        [(uu + bbox[0] - cam.cx) * d / cam.fx, (vv + bbox[1] - cam.cy) * d / cam.fy, d], axis=-1
    )
    pts_world = pts_cam @ cam.rotation.T + cam.translation
    try:
        normal, _ = plane_normal_svd(pts_world, toward=np.array([world.robot.x, world.robot.y, 1.0]))
    except Exception:
        normal = np.asarray(ex.normal, dtype=float)
    return centroid, normal


def live_local_grid(world: WorldModel) -> OccupancyGrid:
    """Robot-centered local occupancy window (static content + the visitor),
    lattice-aligned with the static grid so cells correspond one-to-one."""
    cfg = world.cfg
    res = cfg.grid_resolution_m
    half = cfg.local_window_m / 2
    n = int(round(cfg.local_window_m / res))
    static = world.static_grid
    ox = static.origin[0] + math.floor((world.robot.x - half - static.origin[0]) / res) * res
    oy = static.origin[1] + math.floor((world.robot.y - half - static.origin[1]) / res) * res
    cells = np.full((n, n), UNKNOWN, dtype=np.int8)
    r0, c0 = static.world_to_cell(ox + res / 2, oy + res / 2)
    sr0, sc0 = max(r0, 0), max(c0, 0)
    sr1, sc1 = min(r0 + n, static.rows), min(c0 + n, static.cols)
    if sr1 > sr0 and sc1 > sc0:
        cells[sr0 - r0 : sr1 - r0, sc0 - c0 : sc1 - c0] = static.cells[sr0:sr1, sc0:sc1]
    grid = OccupancyGrid(origin=np.array([ox, oy]), resolution=res, cells=cells)
    vis = world.visitor
    rad = 0.25
    vr, vc = grid.world_to_cell(vis.x, vis.y)
    span = int(math.ceil(rad / res))
    for r in range(vr - span, vr + span + 1):
        for c in range(vc - span, vc + span + 1):
            if grid.in_bounds(r, c):
                cx, cy = grid.cell_center(r, c)
                if math.hypot(cx - vis.x, cy - vis.y) <= rad:
                    grid.cells[r, c] = OCCUPIED
    return grid


@dataclass(frozen=True)
class SenseResult:
    face: np.ndarray | None
    exhibits: tuple[tuple[str, tuple[int, int, int, int]], ...]
    live_grid: OccupancyGrid


def sense(world: WorldModel, rng: np.random.Generator, noise: bool = True) -> SenseResult:
    detections = []
    for ex in world.exhibits.values():
        bbox = detect_exhibit_bbox(world, ex, rng, noise=noise)
        if bbox is not None:
            detections.append((ex.id, bbox))
    return SenseResult(
        face=face_measurement(world, rng, noise=noise),
        exhibits=tuple(detections),
        live_grid=live_local_grid(world),
    )


def annotate_exhibits(
    world: WorldModel,
    rng: np.random.Generator,
    survey_nav_ids: list[str] | None = None,
    noise: bool = True,
) -> dict[str, np.ndarray]:
    """Survey pass that registers every exhibit visible from the stops.

    The scratch robot visits each survey pose, aims the head at each
    pre-annotated center, and records the detected centroid. Exhibits never
    seen stay absent from the registry.
    """
    from .geometry import pan_tilt_ik  # local import avoids cycle at module load

    scratch = world.clone()
    if survey_nav_ids is None:
        seen_nav = {}
        for ex in sorted(world.exhibits.values(), key=lambda e: e.nav_point[0]):
            key = (round(ex.nav_point[0], 6), round(ex.nav_point[1], 6))
            seen_nav.setdefault(key, ex.id)
        survey_nav_ids = list(seen_nav.values())
    registry: dict[str, np.ndarray] = {}
    for nav_id in survey_nav_ids:
        nav = world.exhibits[nav_id].nav_point
        scratch.robot.x, scratch.robot.y, scratch.robot.theta = nav
        for ex in world.exhibits.values():
            pivot = np.array([scratch.robot.x, scratch.robot.y, world.cfg.head_pivot_height_m])
            rel_world = np.asarray(ex.center, dtype=float) - pivot
            c, s = math.cos(-scratch.robot.theta), math.sin(-scratch.robot.theta)
            rel_body = np.array([c * rel_world[0] - s * rel_world[1], s * rel_world[0] + c * rel_world[1], rel_world[2]])
            aim = pan_tilt_ik(rel_body)
            scratch.robot.head_yaw = aim.yaw
            scratch.robot.head_pitch = aim.pitch
            found = ground_exhibit(scratch, ex, rng, noise=noise)
            if found is not None:
                registry[ex.id] = found[0]
    return registry


# ---------------------------------------------------------------------------
# Visitor gaze model


@dataclass(frozen=True)
class GazeSample:
    t: float
    u: float
    v: float
    on_wall: bool


GAZE_CSV_HEADER = "t,u,v,on_wall"


def save_gaze_csv(samples, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(GAZE_CSV_HEADER + "\n")
        for s in samples:
            fh.write(f"{s.t:.3f},{s.u:.6f},{s.v:.6f},{int(s.on_wall)}\n")


def load_gaze_csv(path) -> list[GazeSample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != GAZE_CSV_HEADER:
            raise WorldFileError(f"{path}: unexpected gaze header {header!r}")
        for line in fh:
            t, u, v, flag = line.strip().split(",")
            samples.append(GazeSample(float(t), float(u), float(v), flag == "1"))
    return samples


class VisitorGazeModel:
    """Behavioral stand-in for a human visitor's gaze, sampled at 50 Hz.

    Cued regime: a deictic cue (head turn or laser start) sends the gaze to
    the cued exhibit after a reaction latency. Searching regime: absent a
    cue, scanning starts after a comprehension delay and visits exhibit
    labels in salience order before settling on the target. Between
    presentations the gaze follows the robot (off-wall samples).
    """

    def __init__(self, world: WorldModel, rng: np.random.Generator):
        self.world = world
        self.cfg = world.cfg
        self.rng = rng
        self.wall = world.wall
        self.target: str | None = None
        self.scan_start = math.inf
        self.scan_entries: list[tuple[float, float, tuple[float, float]]] = []
        self.scan_settle = math.inf
        self.cue_settle = math.inf
        self.distracted_until = -math.inf

    def presentation_started(self, exhibit_id: str | None, t: float) -> None:
        self.target = exhibit_id
        self.cue_settle = math.inf
        self.distracted_until = -math.inf
        if exhibit_id is None:
            self.scan_start = math.inf
            self.scan_entries = []
            self.scan_settle = math.inf
            return
        self.scan_start = t + self.cfg.search_onset_s
        entries: list[tuple[float, float, tuple[float, float]]] = []
        cursor = self.scan_start
        nav_anchor = None
        ex = self.world.exhibits[exhibit_id]
        for other_id in stop_salience_order(self.world.exhibits, ex.id):
            if other_id == exhibit_id:
                break
            other = self.world.exhibits[other_id]
            if other.label_box is None:
                continue
            entries.append((cursor, cursor + self.cfg.label_dwell_s, (other.label_box.u, other.label_box.v)))
            cursor += self.cfg.label_dwell_s
        self.scan_entries = entries
        self.scan_settle = cursor

    def cue(self, exhibit_id: str, t: float) -> None:
        if exhibit_id != self.target:
            return
        if self.cue_settle is not math.inf and self.cue_settle <= t:
            return
        latency = max(0.05, self.rng.normal(self.cfg.reaction_latency_mean_s, self.cfg.reaction_latency_sd_s))
        self.cue_settle = min(self.cue_settle, t + latency)

    def _settle_time(self) -> float:
        return min(self.scan_settle, self.cue_settle)

    def _robot_wall_point(self) -> tuple[float, float]:
        head = np.array([self.world.robot.x, self.world.robot.y, self.cfg.head_pivot_height_m])
        eye = self.world.visitor.face_point
        hit = self.wall.intersect_ray(eye, head - eye)
        if hit is None:
            hit = self.wall.to_wall(eye - (eye @ self.wall.normal) * self.wall.normal)
        return hit

    def tick(self, t: float, n_samples: int, dt_sample: float) -> list[GazeSample]:
        settled = self.target is not None and t >= self._settle_time()
        if settled and t >= self.distracted_until:
            if self.rng.random() < self.cfg.distraction_p_per_tick:
                self.distracted_until = t + self.cfg.distraction_dwell_s
            else:
                self.distracted_until = -math.inf
        jitter = self.rng.normal(0.0, self.cfg.gaze_jitter_m, (n_samples, 2))
        samples = []
        for j in range(n_samples):
            ts = t + j * dt_sample
            point, on_wall = self._point_at(ts)
            u = point[0] + jitter[j, 0]
            v = point[1] + jitter[j, 1]
            samples.append(GazeSample(ts, u, v, on_wall and self.wall.contains(u, v)))
        return samples

    def _point_at(self, ts: float) -> tuple[tuple[float, float], bool]:
        if self.target is None:
            return self._robot_wall_point(), False
        settle = self._settle_time()
        if ts >= settle:
            if ts < self.distracted_until:
                return self._robot_wall_point(), False
            ex = self.world.exhibits[self.target]
            return self.wall.to_wall(ex.center), True
        if ts >= self.scan_start:
            for start, end, point in self.scan_entries:
                if start <= ts < end:
                    return point, True
        return self._robot_wall_point(), False
