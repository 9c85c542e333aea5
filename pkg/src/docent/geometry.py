"""Numeric kernels: pan-tilt IK, Kalman face filtering, plane fitting,
circular pointing paths, pinhole back-projection, costmap differencing,
laser reachability, and grid path planning.

Conventions: world frame x/y on the floor, z up; robot body frame x forward,
y left, z up; angles in radians, yaw positive to the left, pitch positive up.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegeneratePatchError,
    DegenerateTargetError,
    NoDepthError,
    UnreachableGoalError,
)

FREE = 0
OCCUPIED = 1
UNKNOWN = 2

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Pan-tilt inverse kinematics


@dataclass(frozen=True)
class PanTiltLimits:
    yaw: tuple[float, float]
    pitch: tuple[float, float]


@dataclass(frozen=True)
class PanTiltTarget:
    yaw: float
    pitch: float
    clamped: bool = False


def pan_tilt_ik(target, limits: PanTiltLimits | None = None) -> PanTiltTarget:
    """Solve yaw/pitch so the forward ray passes through ``target``.

    ``target`` is a 3D point in the gimbal pivot frame. Angles outside the
    joint limits are clamped and reported via ``clamped`` rather than
    silently accepted.
    """
    t = np.asarray(target, dtype=float)
    norm = float(np.linalg.norm(t))
    if norm < 1e-12:
        raise DegenerateTargetError("pan-tilt target coincides with the pivot origin")
    yaw = math.atan2(t[1], t[0])
    pitch = math.atan2(t[2], math.hypot(t[0], t[1]))
    clamped = False
    if limits is not None:
        cy = min(max(yaw, limits.yaw[0]), limits.yaw[1])
        cp = min(max(pitch, limits.pitch[0]), limits.pitch[1])
        clamped = (cy != yaw) or (cp != pitch)
        yaw, pitch = cy, cp
    return PanTiltTarget(yaw=yaw, pitch=pitch, clamped=clamped)


def pan_tilt_forward(yaw: float, pitch: float) -> np.ndarray:
    """Unit forward ray for the given joint angles (inverse of the IK)."""
    cp = math.cos(pitch)
    return np.array([cp * math.cos(yaw), cp * math.sin(yaw), math.sin(pitch)])


# ---------------------------------------------------------------------------
# Constant-velocity Kalman filter for the visitor's face


@dataclass(frozen=True)
class FaceTrack:
    """Filter state: 3D position + velocity with a 6x6 covariance.

    ``t`` is the filter clock; ``last_seen`` is the time of the most recent
    accepted measurement.
    """

    position: np.ndarray
    velocity: np.ndarray
    covariance: np.ndarray
    t: float = 0.0
    last_seen: float = 0.0


def face_track_init(position, t: float = 0.0, pos_var: float = 1.0, vel_var: float = 1.0) -> FaceTrack:
    p = np.asarray(position, dtype=float)
    cov = np.diag([pos_var] * 3 + [vel_var] * 3).astype(float)
    return FaceTrack(position=p, velocity=np.zeros(3), covariance=cov, t=t, last_seen=t)


def kalman_step(
    track: FaceTrack,
    dt: float,
    measurement=None,
    q: float = 0.5,
    r: float = 0.05,
) -> FaceTrack:
    """One predict(+update) cycle of a constant-velocity filter.

    ``q`` is the white-noise acceleration density (m/s^2), ``r`` the
    measurement noise (m). Non-finite measurements are rejected and treated
    as absent. The returned covariance is re-symmetrized so it stays PSD.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.concatenate([track.position, track.velocity])
    F = np.eye(6)
    F[0:3, 3:6] = dt * np.eye(3)
    qq = q * q
    q11 = qq * dt**4 / 4.0
    q12 = qq * dt**3 / 2.0
    q22 = qq * dt**2
    Q = np.zeros((6, 6))
    Q[0:3, 0:3] = q11 * np.eye(3)
    Q[0:3, 3:6] = q12 * np.eye(3)
    Q[3:6, 0:3] = q12 * np.eye(3)
    Q[3:6, 3:6] = q22 * np.eye(3)

    x = F @ x
    P = F @ track.covariance @ F.T + Q
    t_now = track.t + dt
    last_seen = track.last_seen

    z = None
    if measurement is not None:
        z = np.asarray(measurement, dtype=float)
        if z.shape != (3,) or not np.all(np.isfinite(z)):
            z = None
    if z is not None:
        H = np.zeros((3, 6))
        H[0:3, 0:3] = np.eye(3)
        R = (r * r) * np.eye(3)
        S = H @ P @ H.T + R
        K = P @ H.T @ np.linalg.inv(S)
        x = x + K @ (z - H @ x)
        ikh = np.eye(6) - K @ H
        # Joseph form keeps the covariance PSD under roundoff.
        P = ikh @ P @ ikh.T + K @ R @ K.T
        last_seen = t_now
    P = 0.5 * (P + P.T)
    return FaceTrack(position=x[0:3], velocity=x[3:6], covariance=P, t=t_now, last_seen=last_seen)


# ---------------------------------------------------------------------------
# Plane fitting and circular pointing paths


def plane_normal_svd(points, toward=None) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares plane through ``points`` via SVD of the centered matrix.

    Returns ``(normal, centroid)`` with a unit normal. When ``toward`` is
    given the sign is chosen so the normal faces that point (dot with
    ``toward - centroid`` >= 0). Raises on collinear/degenerate sets.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
        raise ValueError("need at least three 3D points")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    # Rows are observations; the right singular vector of the smallest
    # singular value spans the null direction = plane normal.
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] < 1e-12 or s[1] < 1e-8 * s[0]:
        raise DegeneratePatchError("point patch is collinear or degenerate")
    normal = vt[-1]
    normal = normal / np.linalg.norm(normal)
    if toward is not None:
        ref = np.asarray(toward, dtype=float) - centroid
        if float(normal @ ref) < 0.0:
            normal = -normal
    return normal, centroid


def circular_path(
    center,
    normal,
    radius: float,
    samples_per_rev: int,
    revolutions: int = 3,
) -> np.ndarray:
    """Sample ``revolutions`` laps of a circle on the plane (center, normal).

    In-plane basis: u = normalize(normal x world-z), falling back to
    normal x world-x when the normal is parallel to z; v = normal x u.
    Points are ordered by ascending angle and repeat each revolution.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if samples_per_rev < 3:
        raise ValueError("need at least 3 samples per revolution")
    if revolutions < 1:
        raise ValueError("revolutions must be >= 1")
    c = np.asarray(center, dtype=float)
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    u = np.cross(n, np.array([0.0, 0.0, 1.0]))
    if np.linalg.norm(u) < 1e-9:
        u = np.cross(n, np.array([1.0, 0.0, 0.0]))
    u = u / np.linalg.norm(u)
    v = np.cross(n, u)
    theta = 2.0 * np.pi * np.arange(revolutions * samples_per_rev) / samples_per_rev
    return c + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))


# ---------------------------------------------------------------------------
# Pinhole camera and exhibit centroid back-projection


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics plus camera-to-world pose.

    Camera frame: +z optical axis, +x image right, +y image down.
    ``rotation`` columns are the camera axes expressed in world coordinates.
    """

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    def project(self, world_point) -> tuple[float, float, float]:
        """Project to pixel coordinates; returns (u, v, depth)."""
        p = self.rotation.T @ (np.asarray(world_point, dtype=float) - self.translation)
        d = p[2]
        return self.cx + self.fx * p[0] / d, self.cy + self.fy * p[1] / d, d

    def to_world(self, cam_point) -> np.ndarray:
        return self.rotation @ np.asarray(cam_point, dtype=float) + self.translation


def exhibit_centroid(depth_patch, bbox, camera: CameraModel) -> np.ndarray:
    """Mean world point of all valid depth pixels inside ``bbox``.

    ``bbox`` is an integer, inclusive pixel rectangle (u0, v0, u1, v1);
    ``depth_patch`` must cover exactly that rectangle, row v, column u.
    Valid pixels carry a finite, positive z-depth. Each valid pixel (u, v, d)
    back-projects to ((u-cx)d/fx, (v-cy)d/fy, d) in the camera frame.
    """
    u0, v0, u1, v1 = (int(x) for x in bbox)
    if not (0 <= u0 <= u1 < camera.width and 0 <= v0 <= v1 < camera.height):
        raise ValueError("bbox outside the image")
    depth = np.asarray(depth_patch, dtype=float)
    if depth.shape != (v1 - v0 + 1, u1 - u0 + 1):
        raise ValueError("depth patch does not cover the bbox")
    valid = np.isfinite(depth) & (depth > 0)
    if not np.any(valid):
        raise NoDepthError("no valid depth inside the bounding box")
    vv, uu = np.nonzero(valid)
    d = depth[vv, uu]
    u = uu + u0
    v = vv + v0
    x = (u - camera.cx) * d / camera.fx
    y = (v - camera.cy) * d / camera.fy
    mean_cam = np.array([x.mean(), y.mean(), d.mean()])
    return camera.to_world(mean_cam)


# ---------------------------------------------------------------------------
# Occupancy grids, costmap differencing, and A*


@dataclass
class OccupancyGrid:
    """Row-major grid; row index follows world y, column index world x.

    ``origin`` is the world position of the outer corner of cell (0, 0).
    Cell codes: 0 free, 1 occupied, 2 unknown.
    """

    origin: np.ndarray
    resolution: float
    cells: np.ndarray

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float)
        self.cells = np.asarray(self.cells, dtype=np.int8)
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        c = int(math.floor((x - self.origin[0]) / self.resolution))
        r = int(math.floor((y - self.origin[1]) / self.resolution))
        return r, c

    def cell_center(self, r: int, c: int) -> tuple[float, float]:
        return (
            self.origin[0] + (c + 0.5) * self.resolution,
            self.origin[1] + (r + 0.5) * self.resolution,
        )

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.rows and 0 <= c < self.cols

    def to_dict(self) -> dict:
        return {
            "origin": [float(self.origin[0]), float(self.origin[1])],
            "resolution": self.resolution,
            "rows": self.rows,
            "cols": self.cols,
            "cells": [int(v) for v in self.cells.reshape(-1)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OccupancyGrid":
        cells = np.asarray(data["cells"], dtype=np.int8).reshape(data["rows"], data["cols"])
        return cls(origin=np.asarray(data["origin"], dtype=float), resolution=float(data["resolution"]), cells=cells)


def visitor_from_costmap_diff(static: OccupancyGrid, live: OccupancyGrid, face_height: float = 1.6):
    """Locate the visitor as the largest cluster of newly occupied cells.

    Cells occupied in ``live`` but free in ``static`` are clustered with
    4-connectivity; the centroid of the largest cluster is returned as
    (x, y, face_height). Returns None when the diff is empty. Ties between
    equal-sized clusters resolve to the one discovered first in scan order.
    """
    if abs(static.resolution - live.resolution) > 1e-12:
        raise ValueError("grids must share one resolution")
    diff = np.zeros_like(live.cells, dtype=bool)
    occ = np.argwhere(live.cells == OCCUPIED)
    for r, c in occ:
        x, y = live.cell_center(int(r), int(c))
        sr, sc = static.world_to_cell(x, y)
        if static.in_bounds(sr, sc) and static.cells[sr, sc] == FREE:
            diff[r, c] = True
    if not diff.any():
        return None
    seen = np.zeros_like(diff, dtype=bool)
    best: list[tuple[int, int]] = []
    for r0, c0 in np.argwhere(diff):
        if seen[r0, c0]:
            continue
        stack = [(int(r0), int(c0))]
        seen[r0, c0] = True
        cluster = []
        while stack:
            r, c = stack.pop()
            cluster.append((r, c))
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < diff.shape[0] and 0 <= cc < diff.shape[1] and diff[rr, cc] and not seen[rr, cc]:
                    seen[rr, cc] = True
                    stack.append((rr, cc))
        if len(cluster) > len(best):
            best = cluster
    centers = np.array([live.cell_center(r, c) for r, c in best])
    x, y = centers.mean(axis=0)
    return np.array([x, y, face_height])


def laser_reachable(target, robot_pose, blocked_sector_deg=(-150.0, -30.0)) -> bool:
    """Whether the body-frame azimuth of ``target`` avoids the chassis shadow.

    ``blocked_sector_deg`` is an open interval; targets exactly on a boundary
    count as reachable.
    """
    x, y, theta = robot_pose
    t = np.asarray(target, dtype=float)
    az = math.atan2(t[1] - y, t[0] - x) - theta
    az = math.atan2(math.sin(az), math.cos(az))
    lo = math.radians(blocked_sector_deg[0])
    hi = math.radians(blocked_sector_deg[1])
    return not (lo < az < hi)


def _neighbors(grid: OccupancyGrid, r: int, c: int):
    """8-connected successors; diagonals cannot cut occupied corners."""
    cells = grid.cells
    for dr, dc, cost in (
        (-1, 0, 1.0),
        (1, 0, 1.0),
        (0, -1, 1.0),
        (0, 1, 1.0),
        (-1, -1, _SQRT2),
        (-1, 1, _SQRT2),
        (1, -1, _SQRT2),
        (1, 1, _SQRT2),
    ):
        rr, cc = r + dr, c + dc
        if not grid.in_bounds(rr, cc) or cells[rr, cc] != FREE:
            continue
        if dr != 0 and dc != 0 and (cells[r + dr, c] != FREE or cells[r, c + dc] != FREE):
            continue
        yield rr, cc, cost


def _octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    return max(dr, dc) + (_SQRT2 - 1.0) * min(dr, dc)


def astar_plan(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]) -> list[tuple[int, int]]:
    """Optimal 8-connected path (diagonal cost sqrt(2), octile heuristic)."""
    start = (int(start[0]), int(start[1]))
    goal = (int(goal[0]), int(goal[1]))
    for name, cell in (("start", start), ("goal", goal)):
        if not grid.in_bounds(*cell) or grid.cells[cell] != FREE:
            raise ValueError(f"{name} cell is not free")
    open_heap = [(0.0, start)]
    g = {start: 0.0}
    came: dict[tuple[int, int], tuple[int, int]] = {}
    closed = set()
    while open_heap:
        _, cur = heapq.heappop(open_heap)
        if cur == goal:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            path.reverse()
            return path
        if cur in closed:
            continue
        closed.add(cur)
        for rr, cc, step in _neighbors(grid, *cur):
            cand = g[cur] + step
            if cand < g.get((rr, cc), math.inf):
                g[(rr, cc)] = cand
                came[(rr, cc)] = cur
                heapq.heappush(open_heap, (cand + _octile((rr, cc), goal), (rr, cc)))
    raise UnreachableGoalError(f"no path from {start} to {goal}")


def path_cost(path: list[tuple[int, int]]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += _SQRT2 if (a[0] != b[0] and a[1] != b[1]) else 1.0
    return total
