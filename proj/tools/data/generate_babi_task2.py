#!/usr/bin/env python3
"""Writes a bAbI Task-2 style test file (v1.2 plain-text layout).

Stories are random walks over move / take / drop events; every question asks
where an object is, and the answer comes from this script's own bookkeeping.
"""

import argparse
import random

CHARACTERS = ["Mary", "John", "Daniel", "Sandra"]
LOCATIONS = ["bathroom", "hallway", "office", "kitchen", "garden", "bedroom"]
OBJECTS = ["football", "apple", "milk"]

MOVE = ["moved to", "went to", "journeyed to", "travelled to", "went back to"]
TAKE = ["got", "grabbed", "picked up", "took"]
DROP = ["dropped", "discarded", "put down", "left"]


class Story:
    def __init__(self, rng):
        self.rng = rng
        self.where = {}      # character -> location
        self.holder = {}     # object -> character
        self.placed = {}     # object -> location when not held
        self.lines = []      # (id, text)
        self.last_move = {}  # character -> line id
        self.last_touch = {} # object -> (line id, character)

    def next_id(self):
        return len(self.lines) + 1

    def options(self):
        opts = []
        for c in CHARACTERS:
            for loc in LOCATIONS:
                if self.where.get(c) != loc:
                    opts.append(("move", c, loc))
            if c not in self.where:
                continue
            for o in OBJECTS:
                if o in self.holder:
                    if self.holder[o] == c:
                        opts.extend([("drop", c, o)] * 3)
                elif self.placed.get(o) in (None, self.where[c]):
                    opts.extend([("take", c, o)] * 3)
        return opts

    def step(self):
        kind, who, what = self.rng.choice(self.options())
        line_id = self.next_id()
        if kind == "move":
            self.where[who] = what
            self.last_move[who] = line_id
            text = f"{who} {self.rng.choice(MOVE)} the {what}."
        elif kind == "take":
            self.holder[what] = who
            self.placed.pop(what, None)
            self.last_touch[what] = (line_id, who)
            there = " there" if self.rng.random() < 0.5 else ""
            text = f"{who} {self.rng.choice(TAKE)} the {what}{there}."
        else:
            del self.holder[what]
            self.placed[what] = self.where[who]
            self.last_touch[what] = (line_id, who)
            text = f"{who} {self.rng.choice(DROP)} the {what}."
        self.lines.append((line_id, text))

    def location_of(self, obj):
        if obj in self.holder:
            return self.where.get(self.holder[obj])
        return self.placed.get(obj)

    def support(self, obj):
        touch_id, who = self.last_touch[obj]
        ids = {touch_id}
        if obj in self.holder and who in self.last_move:
            ids.add(self.last_move[who])
        elif who in self.last_move and self.last_move[who] < touch_id:
            ids.add(self.last_move[who])
        return sorted(ids)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=2)
    parser.add_argument("--stories", type=int, default=200)
    parser.add_argument("--questions", type=int, default=5)
    parser.add_argument("--out", default="assets/data/babi/qa2_test.txt")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for _ in range(args.stories):
            story = Story(rng)
            for _ in range(args.questions):
                for _ in range(rng.randint(2, 6)):
                    story.step()
                while not [o for o in OBJECTS if o in story.last_touch and story.location_of(o)]:
                    story.step()
                known = [o for o in OBJECTS if o in story.last_touch and story.location_of(o)]
                obj = rng.choice(known)
                support = " ".join(str(i) for i in story.support(obj))
                qid = story.next_id()
                story.lines.append((qid, f"Where is the {obj}?\t{story.location_of(obj)}\t{support}"))
            for line_id, text in story.lines:
                if "\t" in text:
                    q, a, s = text.split("\t")
                    fh.write(f"{line_id} {q} \t{a}\t{s}\n")
                else:
                    fh.write(f"{line_id} {text}\n")


if __name__ == "__main__":
    main()
