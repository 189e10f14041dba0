#!/usr/bin/env python3
"""Regenerates the desk-scale maps and scenarios under crates/core/data.

The maps reuse MovingAI benchmark names and passable-cell counts so suites
written against the public benchmark run unchanged, but the layouts are
generated here (seeded) rather than copied.
"""
import random
from collections import deque
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def components(grid):
    h, w = len(grid), len(grid[0])
    seen = set()
    comps = []
    for y in range(h):
        for x in range(w):
            if grid[y][x] != "." or (x, y) in seen:
                continue
            q = deque([(x, y)])
            seen.add((x, y))
            cells = []
            while q:
                cx, cy = q.popleft()
                cells.append((cx, cy))
                for dx, dy in STEPS:
                    nx, ny = cx + dx, cy + dy
                    if 0 <= nx < w and 0 <= ny < h and grid[ny][nx] == "." and (nx, ny) not in seen:
                        seen.add((nx, ny))
                        q.append((nx, ny))
            comps.append(cells)
    return comps


def connect(grid, rng):
    """Moves cells of minor components next to the main one, keeping the count."""
    h, w = len(grid), len(grid[0])
    while True:
        comps = sorted(components(grid), key=len, reverse=True)
        if len(comps) == 1:
            return grid
        main = comps[0]
        x, y = comps[-1][0]
        border = sorted({(cx + dx, cy + dy) for cx, cy in main for dx, dy in STEPS
                         if 0 <= cx + dx < w and 0 <= cy + dy < h
                         and grid[cy + dy][cx + dx] == "@"})
        bx, by = rng.choice(border)
        grid[y][x] = "@"
        grid[by][bx] = "."


def random_map(w, h, passable, seed):
    rng = random.Random(seed)
    cells = [(x, y) for y in range(h) for x in range(w)]
    blocked = set(rng.sample(cells, w * h - passable))
    grid = [["@" if (x, y) in blocked else "." for x in range(w)] for y in range(h)]
    return connect(grid, rng)


def room_map(w, h, passable, seed):
    """3x3 rooms behind one-cell walls, joined by a random spanning tree of doors."""
    rng = random.Random(seed)
    lines = list(range(3, w - 1, 4))
    grid = [["@" if (x in lines or y in lines) else "." for x in range(w)] for y in range(h)]
    n = len(lines) + 1
    spans = [(0 if i == 0 else lines[i - 1] + 1, lines[i] if i < len(lines) else w) for i in range(n)]
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        rx, ry = stack[-1]
        nbrs = [(rx + dx, ry + dy) for dx, dy in STEPS
                if 0 <= rx + dx < n and 0 <= ry + dy < n and (rx + dx, ry + dy) not in seen]
        if not nbrs:
            stack.pop()
            continue
        nx, ny = rng.choice(nbrs)
        if nx != rx:
            x = lines[min(rx, nx)]
            y = rng.randrange(*spans[ry])
        else:
            y = lines[min(ry, ny)]
            x = rng.randrange(*spans[rx])
        grid[y][x] = "."
        seen.add((nx, ny))
        stack.append((nx, ny))
    free = sum(r.count(".") for r in grid)
    cells = [(x, y) for y in range(h) for x in range(w)
             if grid[y][x] == "." and x not in lines and y not in lines]
    rng.shuffle(cells)
    while free > passable:
        x, y = cells.pop()
        grid[y][x] = "@"
        if len(components(grid)) == 1:
            free -= 1
        else:
            grid[y][x] = "."
    return grid


def write_map(name, grid):
    h, w = len(grid), len(grid[0])
    body = "".join("".join(r) + "\n" for r in grid)
    (OUT / f"{name}.map").write_text(f"type octile\nheight {h}\nwidth {w}\nmap\n{body}")


def bfs(grid, s):
    h, w = len(grid), len(grid[0])
    dist = {s: 0}
    q = deque([s])
    while q:
        cx, cy = q.popleft()
        for dx, dy in STEPS:
            nx, ny = cx + dx, cy + dy
            if 0 <= nx < w and 0 <= ny < h and grid[ny][nx] == "." and (nx, ny) not in dist:
                dist[(nx, ny)] = dist[(cx, cy)] + 1
                q.append((nx, ny))
    return dist


def write_scen(name, grid, rows, seed):
    rng = random.Random(seed)
    h, w = len(grid), len(grid[0])
    free = [(x, y) for y in range(h) for x in range(w) if grid[y][x] == "."]
    starts = rng.sample(free, rows)
    goals = rng.sample(free, rows)
    out = ["version 1"]
    for (sx, sy), (gx, gy) in zip(starts, goals):
        d = bfs(grid, (sx, sy))[(gx, gy)]
        out.append(f"{d // 4}\t{name}.map\t{w}\t{h}\t{sx}\t{sy}\t{gx}\t{gy}\t{float(d):.8f}")
    (OUT / f"{name}-random-1.scen").write_text("\n".join(out) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    maps = {
        "random-32-32-20": random_map(32, 32, 819, 20),
        "room-32-32-4": room_map(32, 32, 682, 4),
        "empty-16-16": [["."] * 16 for _ in range(16)],
    }
    for i, (name, grid) in enumerate(maps.items()):
        write_map(name, grid)
        write_scen(name, grid, 100, 1000 + i)


if __name__ == "__main__":
    main()
