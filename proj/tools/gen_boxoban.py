#!/usr/bin/env python3
# Copyright 2026 The mctses Authors.
# SPDX-License-Identifier: Apache-2.0
"""Generate solvable 10x10 Boxoban-format levels by reverse play.

Boxes start on goals and the agent pulls them around; every pull is the
reverse of a legal push, so the final layout is solvable.
"""
import argparse
import random

N = 10
DIRS = [(-1, 0), (1, 0), (0, -1), (0, 1)]


def room(rng):
    walls = [[r in (0, N - 1) or c in (0, N - 1) for c in range(N)] for r in range(N)]
    for _ in range(rng.randint(0, 8)):
        r, c = rng.randint(1, N - 2), rng.randint(1, N - 2)
        walls[r][c] = True
    return walls


def connected(walls):
    free = [(r, c) for r in range(N) for c in range(N) if not walls[r][c]]
    if not free:
        return False
    seen = {free[0]}
    stack = [free[0]]
    while stack:
        r, c = stack.pop()
        for dr, dc in DIRS:
            nxt = (r + dr, c + dc)
            if not walls[nxt[0]][nxt[1]] and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(free)


def generate(rng, num_boxes, pulls):
    while True:
        walls = room(rng)
        if not connected(walls):
            continue
        free = [(r, c) for r in range(N) for c in range(N) if not walls[r][c]]
        picks = rng.sample(free, num_boxes + 1)
        goals = set(picks[:num_boxes])
        boxes = set(goals)
        agent = picks[num_boxes]
        for _ in range(pulls):
            dr, dc = rng.choice(DIRS)
            ahead = (agent[0] + dr, agent[1] + dc)
            behind = (agent[0] - dr, agent[1] - dc)
            if walls[ahead[0]][ahead[1]] or ahead in boxes:
                continue
            if behind in boxes and rng.random() < 0.7:
                boxes.remove(behind)
                boxes.add(agent)
            agent = ahead
        if boxes != goals:
            return walls, goals, boxes, agent


def render(walls, goals, boxes, agent):
    rows = []
    for r in range(N):
        row = []
        for c in range(N):
            p = (r, c)
            if walls[r][c]:
                ch = "#"
            elif p == agent:
                ch = "+" if p in goals else "@"
            elif p in boxes:
                ch = "*" if p in goals else "$"
            else:
                ch = "." if p in goals else " "
            row.append(ch)
        rows.append("".join(row))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--boxes", type=int, default=4)
    ap.add_argument("--pulls", type=int, default=300)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for i in range(args.count):
        print(f"; {i}")
        print("\n".join(render(*generate(rng, args.boxes, args.pulls))))
        print()


if __name__ == "__main__":
    main()
