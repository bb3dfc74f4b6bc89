#!/usr/bin/env python3
"""Regenerates the JSON scenario fixtures under scenarios/.

Geometry is written out in full so the fixtures stay readable without this
script; rerun it after changing any dimension here.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
IDENTITY = [1.0, 0.0, 0.0, 0.0]


def box(hx, hy, hz, at=(0.0, 0.0, 0.0)):
    return {"kind": "box", "dims": [hx, hy, hz],
            "offset": {"position": list(at), "orientation": IDENTITY}}


def cylinder(r, hh, at=(0.0, 0.0, 0.0)):
    return {"kind": "cylinder", "dims": [r, hh],
            "offset": {"position": list(at), "orientation": IDENTITY}}


def obj(id_, label, shapes, position=(0.0, 0.0, 0.0), static=True, mass=0.0, **attrs):
    return {"id": id_, "label": label, "static": static, "mass": mass,
            "pose": {"position": list(position), "orientation": IDENTITY},
            "shapes": shapes, "attributes": attrs}


def r(v):
    return round(v, 6)


def write(path, objects, placement, ws_min, ws_max, meta=None):
    doc = {"objects": objects, "placement_object": placement,
           "workspace": {"min": ws_min, "max": ws_max}, "gravity": 9.81}
    if meta:
        doc["scenario"] = meta
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def plate():
    return obj("plate", "Plate", [box(0.11, 0.005, 0.11)], static=False, mass=0.4,
               category="dish", color="white", shape="round")


def dish_rack(name, gap, centers):
    # Rails run along x; each slot is bounded by two rails 0.12 m tall.
    shapes = [box(0.15, 0.1, 0.005, (0.0, 0.0, 0.005))]
    rails = []
    for c in centers:
        for side in (-1, 1):
            y = r(c + side * (gap / 2 + 0.005))
            if y not in rails:
                rails.append(y)
    for y in sorted(rails):
        shapes.append(box(0.15, 0.005, 0.06, (0.0, y, 0.07)))
    objects = [
        obj("table", "Table", [box(0.4, 0.35, 0.02)], (0.0, 0.0, -0.02)),
        obj("rack", "DishRack", shapes, category="dish"),
    ]
    meta = {"id": name, "task": "Put the plate away in the dish rack.",
            "similarity_hint": "object_property", "ground_truth": ["rack"],
            "z_mode": "surface_snap", "resolution": 0.01}
    write(ROOT / "bench" / f"{name}.json", objects, plate(),
          [-0.3, -0.25, 0.0], [0.3, 0.25, 0.2], meta)


def book(id_, x, z, genre, static=True):
    return obj(id_, "Book", [box(0.015, 0.05, 0.1)], (x, -0.02, z), static=static,
               mass=0.5, genre=genre, category="book")


def shelf_shapes(levels):
    # Boards 0.02 thick every 0.35 m, side panels and a back panel.
    height = 0.35 * (levels - 1) + 0.02
    shapes = [box(0.3, 0.125, 0.01, (0.0, 0.0, r(0.01 + 0.35 * k))) for k in range(levels)]
    shapes.append(box(0.01, 0.125, r(height / 2), (-0.31, 0.0, r(height / 2))))
    shapes.append(box(0.01, 0.125, r(height / 2), (0.31, 0.0, r(height / 2))))
    shapes.append(box(0.32, 0.01, r(height / 2), (0.0, 0.135, r(height / 2))))
    bounds = [0.0] + [r(0.36 + 0.35 * k) for k in range(levels - 2)] + [r(height)]
    return shapes, height, ",".join(f"{b:g}" for b in bounds)


def floor():
    return obj("floor", "Floor", [box(0.6, 0.5, 0.02)], (0.0, 0.0, -0.02))


def bookshelf(name, tiers, genres, target):
    shapes, height, bounds = shelf_shapes(tiers + 1)
    objects = [floor(), obj("bookshelf", "Bookshelf", shapes, tiers=str(tiers), tier_bounds=bounds)]
    for k, genre in enumerate(genres):
        objects.append(book(f"book_{genre}", -0.2, r(0.02 + 0.35 * k + 0.1), genre))
    placement = book("new_book", 0.0, 0.0, genres[target], static=False)
    placement["pose"]["position"] = [0.0, 0.0, 0.0]
    meta = {"id": name, "task": "Shelve the new book next to books of the same genre.",
            "similarity_hint": "genre", "ground_truth": [f"bookshelf#tier{target + 1}"],
            "z_mode": "surface_levels", "resolution": 0.02}
    write(ROOT / "bench" / f"{name}.json", objects, placement,
          [-0.35, -0.2, 0.0], [0.35, 0.1, r(height + 0.03)], meta)


def category_shelf():
    shapes, height, bounds = shelf_shapes(4)
    objects = [
        floor(),
        obj("shelf", "PantryShelf", shapes, tiers="3", tier_bounds=bounds),
        obj("glass", "Glass", [cylinder(0.035, 0.06)], (-0.2, -0.02, 0.08), category="glassware"),
        obj("soda", "SodaCan", [cylinder(0.033, 0.06)], (-0.2, -0.02, 0.43), category="beverage"),
        obj("chips", "ChipsBox", [box(0.04, 0.03, 0.1)], (-0.2, -0.02, 0.82), category="snack"),
    ]
    placement = obj("crackers", "CrackerBox", [box(0.04, 0.03, 0.08)], static=False, mass=0.3,
                    category="snack", color="yellow")
    meta = {"id": "category_shelf", "task": "Put the crackers where similar items are kept.",
            "similarity_hint": "object_property", "ground_truth": ["shelf#tier3"],
            "z_mode": "surface_levels", "resolution": 0.02}
    write(ROOT / "bench" / "category_shelf.json", objects, placement,
          [-0.35, -0.2, 0.0], [0.35, 0.1, r(height + 0.03)], meta)


def tray(id_, x, color):
    # 0.2 x 0.15 base with 0.03 m walls.
    shapes = [box(0.1, 0.075, 0.005, (0.0, 0.0, 0.005)),
              box(0.1, 0.005, 0.015, (0.0, -0.07, 0.025)),
              box(0.1, 0.005, 0.015, (0.0, 0.07, 0.025)),
              box(0.005, 0.065, 0.015, (-0.095, 0.0, 0.025)),
              box(0.005, 0.065, 0.015, (0.095, 0.0, 0.025))]
    return obj(id_, "Tray", shapes, (x, 0.0, 0.4), color=color)


def category_trays():
    objects = [obj("desk", "Desk", [box(0.6, 0.3, 0.02)], (0.0, 0.0, 0.38))]
    for id_, x, color in (("tray_red", -0.35, "red"), ("tray_green", 0.0, "green"),
                          ("tray_blue", 0.35, "blue")):
        objects.append(tray(id_, x, "gray"))
        objects.append(obj(f"block_{color}", "Block", [box(0.02, 0.02, 0.02)],
                           (x - 0.06, 0.03, 0.43), color=color, category="toy"))
    placement = obj("ball_box", "ToyBox", [box(0.03, 0.03, 0.03)], static=False, mass=0.2,
                    color="green", category="toy")
    meta = {"id": "category_trays", "task": "Sort objects based on colors.",
            "similarity_hint": "color", "ground_truth": ["tray_green"],
            "z_mode": "surface_snap", "resolution": 0.02}
    write(ROOT / "category_trays.json", objects, placement,
          [-0.55, -0.25, 0.4], [0.55, 0.25, 0.5], meta)


def cube(mass=0.3):
    return obj("cube", "Cube", [box(0.05, 0.05, 0.05)], static=False, mass=mass)


def flat_table():
    # Workspace is inset from the table edge by more than the cube's half width.
    objects = [obj("table", "Table", [box(0.4, 0.3, 0.02)], (0.0, 0.0, 0.38))]
    meta = {"id": "flat_table", "task": "Put the cube on the table.",
            "z_mode": "surface_snap", "resolution": 0.05}
    write(ROOT / "flat_table.json", objects, cube(), [-0.3, -0.2, 0.4], [0.3, 0.2, 0.5], meta)


def table_edge():
    # Low table over a floor; points past x = 0.3 overhang the edge.
    objects = [obj("floor", "Floor", [box(1.0, 1.0, 0.02)], (0.0, 0.0, -0.02)),
               obj("table", "Table", [box(0.3, 0.3, 0.1)], (0.0, 0.0, 0.1))]
    meta = {"id": "table_edge", "task": "Put the cube on the table.",
            "z_mode": "surface_snap", "resolution": 0.01}
    write(ROOT / "table_edge.json", objects, cube(), [-0.05, -0.05, 0.2], [0.4, 0.05, 0.3], meta)


def main():
    dish_rack("dish_rack_small", 0.015, [-0.08, -0.03, 0.02, 0.07])
    dish_rack("dish_rack_medium", 0.022, [-0.075, -0.025, 0.025, 0.075])
    dish_rack("dish_rack_large", 0.031, [-0.08, -0.03, 0.02, 0.07])
    bookshelf("bookshelf_two_tier", 2, ["mystery", "science"], 1)
    bookshelf("bookshelf_three_tier", 3, ["mystery", "science", "poetry"], 2)
    category_shelf()
    category_trays()
    flat_table()
    table_edge()


if __name__ == "__main__":
    main()
