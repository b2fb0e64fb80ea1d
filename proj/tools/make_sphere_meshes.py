"""Writes the bundled unstructured sphere meshes (Fibonacci points, convex hull)."""
import argparse
import pathlib

import numpy as np
from scipy.spatial import ConvexHull


def fibonacci_sphere(count, radius, jitter, seed):
    rng = np.random.default_rng(seed)
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = np.pi * (1.0 + 5.0 ** 0.5) * i
    r = np.sqrt(1.0 - z * z)
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    pts += jitter * rng.standard_normal(pts.shape) / np.sqrt(count)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return radius * pts


def outward(points, faces):
    out = []
    for a, b, c in faces:
        n = np.cross(points[b] - points[a], points[c] - points[a])
        if np.dot(n, points[a] + points[b] + points[c]) < 0:
            b, c = c, b
        out.append((a, b, c))
    return out


def write_off(path, points, faces):
    with open(path, "w") as f:
        f.write("OFF\n")
        f.write(f"{len(points)} {len(faces)} 0\n")
        for p in points:
            f.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for a, b, c in faces:
            f.write(f"3 {a} {b} {c}\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--radius", type=float, default=0.5)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    # F = 2 V - 4 for a closed triangulated sphere.
    for faces in (124, 500):
        count = (faces + 4) // 2
        points = fibonacci_sphere(count, args.radius, 0.3, seed=faces)
        hull = ConvexHull(points)
        write_off(out / f"sphere_f{faces}.off", points, outward(points, hull.simplices))


if __name__ == "__main__":
    main()
