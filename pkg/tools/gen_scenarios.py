"""Generate the bundled scenario JSON files."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "goma" / "scenarios"
OUT.mkdir(parents=True, exist_ok=True)

TABLES = ["kitchentable.1", "coffeetable.11"]

HOUSEHOLD_GOALS = [
    {"family": "household", "name": "set_table", "predicates": [
        {"category": "fork", "count": 1, "targets": TABLES},
        {"category": "plate", "count": 1, "targets": TABLES},
        {"category": "waterglass", "count": 1, "targets": TABLES}]},
    {"family": "household", "name": "load_dishwasher", "predicates": [
        {"category": "fork", "count": 1, "targets": ["dishwasher.20"],
         "relation": "inside"},
        {"category": "plate", "count": 1, "targets": ["dishwasher.20"],
         "relation": "inside"}]},
    {"family": "household", "name": "stock_fridge", "predicates": [
        {"category": "apple", "count": 1, "targets": ["fridge.10"],
         "relation": "inside"},
        {"category": "pudding", "count": 1, "targets": ["fridge.10"],
         "relation": "inside"}]},
    {"family": "household", "name": "prepare_snacks", "predicates": [
        {"category": "apple", "count": 1, "targets": TABLES},
        {"category": "pudding", "count": 1, "targets": TABLES}]},
]


def household(name, true_goal, objects, human_known, robot_known,
              extra_rooms=False):
    rooms = {"kitchen": {"adjacent": ["livingroom"]},
             "livingroom": {"adjacent": ["kitchen"]}}
    if extra_rooms:
        rooms["kitchen"]["adjacent"].append("pantry")
        rooms["pantry"] = {"adjacent": ["kitchen"]}
    cfg = {
        "name": name,
        "family": "household",
        "condition": 2,
        "seed": 0,
        "rooms": rooms,
        "containers": {
            "fridge.10": {"room": "kitchen", "open": False},
            "cabinet.132": {"room": "kitchen", "open": False},
            "cabinet.134": {"room": "kitchen", "open": False},
            "cabinet.136": {"room": "kitchen", "open": False},
            "cabinet.133": {"room": "livingroom", "open": False},
            "cabinet.135": {"room": "livingroom", "open": False},
            "cabinet.137": {"room": "livingroom", "open": False},
            "dishwasher.20": {"room": "pantry" if extra_rooms else "kitchen",
                              "open": False},
        },
        "surfaces": {
            "kitchentable.1": {"room": "kitchen"},
            "coffeetable.11": {"room": "livingroom"},
        },
        "objects": objects,
        "agents": {
            "human": {"room": "kitchen", "known": human_known},
            "robot": {"room": "livingroom", "known": robot_known},
        },
        "goal_space": HOUSEHOLD_GOALS,
        "true_goal": true_goal,
    }
    return cfg


# goal items sit in containers a blind lexicographic search reaches late
HH_OBJECTS = {
    "fork.9": {"category": "fork", "location": "cabinet.136"},
    "plate.7": {"category": "plate", "location": "cabinet.137"},
    "waterglass.14": {"category": "waterglass", "location": "cabinet.135"},
    "apple.3": {"category": "apple", "location": "fridge.10"},
    "pudding.5": {"category": "pudding", "location": "cabinet.136"},
}

scenarios = []

scenarios.append(household(
    "household_set_table", "set_table", HH_OBJECTS,
    human_known=["apple.3"],
    robot_known=sorted(HH_OBJECTS)))

objs = dict(HH_OBJECTS)
objs["fork.9"] = {"category": "fork", "location": "kitchentable.1"}
objs["plate.7"] = {"category": "plate", "location": "cabinet.134"}
scenarios.append(household(
    "household_load_dishwasher", "load_dishwasher", objs,
    human_known=["apple.3", "pudding.5"],
    robot_known=sorted(HH_OBJECTS),
    extra_rooms=True))

objs = dict(HH_OBJECTS)
objs["apple.3"] = {"category": "apple", "location": "cabinet.135"}
objs["pudding.5"] = {"category": "pudding", "location": "cabinet.137"}
scenarios.append(household(
    "household_stock_fridge", "stock_fridge", objs,
    human_known=["fork.9"],
    robot_known=sorted(HH_OBJECTS)))

objs = dict(HH_OBJECTS)
objs["apple.3"] = {"category": "apple", "location": "fridge.10"}
objs["pudding.5"] = {"category": "pudding", "location": "cabinet.137"}
scenarios.append(household(
    "household_prepare_snacks", "prepare_snacks", objs,
    human_known=["waterglass.14"],
    robot_known=sorted(HH_OBJECTS)))


KITCHEN_RECIPES = {
    "burger": [("patty", "cooked"), ("potato", "cooked"),
               ("lettuce", "chopped"), ("tomato", "chopped")],
    "pasta": [("spaghetti", "cooked"), ("mushroom", "cooked"),
              ("cream", "cooked"), ("basil", "chopped")],
    "ramen": [("noodle", "cooked"), ("mushroom", "cooked"),
              ("egg", "cooked"), ("scallion", "chopped")],
    "steak_fries": [("beef", "cooked"), ("potato", "cooked"),
                    ("parsley", "chopped")],
}


def kitchen(recipe, a_containers, b_containers):
    ings = KITCHEN_RECIPES[recipe]
    goal_space = [
        {"family": "kitchen", "name": r,
         "ingredients": [{"category": c, "status": s}
                         for c, s in items]}
        for r, items in KITCHEN_RECIPES.items()]
    containers = {}
    for i, cid in enumerate(a_containers):
        containers[cid] = {"room": "kitchen_a", "open": False}
    for cid in b_containers:
        containers[cid] = {"room": "kitchen_b", "open": False}
    # split ingredients: first half in the human's room, rest in the robot's
    objects = {}
    half = (len(ings) + 1) // 2
    for i, (cat, _) in enumerate(ings):
        oid = f"{cat}.{i + 1}"
        pool = a_containers if i < half else b_containers
        objects[oid] = {"category": cat,
                        "location": pool[i % len(pool)]}
    cfg = {
        "name": f"kitchen_{recipe}",
        "family": "kitchen",
        "condition": 1,
        "seed": 0,
        "rooms": {"kitchen_a": {"adjacent": ["kitchen_b"]},
                  "kitchen_b": {"adjacent": ["kitchen_a"]}},
        "containers": containers,
        "surfaces": {
            "counter.2": {"room": "kitchen_a"},
            "counter.3": {"room": "kitchen_b"},
            "servingcounter.4": {"room": "kitchen_a", "serving": True},
            "servingcounter.5": {"room": "kitchen_b", "serving": True},
        },
        "objects": objects,
        "agents": {
            "human": {"room": "kitchen_a", "known": []},
            "robot": {"room": "kitchen_b",
                      "known": sorted(objects)},
        },
        "goal_space": goal_space,
        "true_goal": recipe,
    }
    return cfg


# the first entries of each container list receive the hidden ingredients;
# late-sorting ids there make an uninformed search expensive
scenarios.append(kitchen("burger",
                         ["fridge.21", "cabinet.27",
                          "cabinet.22", "cabinet.23", "cabinet.24",
                          "cabinet.26"],
                         ["fridge.31", "cabinet.32", "cabinet.33"]))
scenarios.append(kitchen("pasta",
                         ["cabinet.28", "fridge.21",
                          "cabinet.22", "cabinet.24", "cabinet.25",
                          "cabinet.27"],
                         ["fridge.31", "cabinet.33", "cabinet.34"]))
scenarios.append(kitchen("ramen",
                         ["fridge.25", "cabinet.28",
                          "cabinet.22", "cabinet.23", "cabinet.26",
                          "cabinet.27"],
                         ["fridge.31", "cabinet.34", "cabinet.35"]))
scenarios.append(kitchen("steak_fries",
                         ["cabinet.27", "fridge.26",
                          "cabinet.22", "cabinet.23", "cabinet.24",
                          "cabinet.25"],
                         ["fridge.32", "cabinet.32", "cabinet.33"]))


scenarios.append({
    "name": "tiny_household",
    "family": "household",
    "condition": 2,
    "seed": 0,
    "rooms": {"kitchen": {"adjacent": ["livingroom"]},
              "livingroom": {"adjacent": ["kitchen"]}},
    "containers": {"fridge.10": {"room": "kitchen", "open": False},
                   "cabinet.132": {"room": "livingroom", "open": False}},
    "surfaces": {"kitchentable.1": {"room": "kitchen"},
                 "coffeetable.11": {"room": "livingroom"}},
    "objects": {
        "plate.7": {"category": "plate", "location": "coffeetable.11"},
        "fork.9": {"category": "fork", "location": "cabinet.132"},
        "apple.3": {"category": "apple", "location": "fridge.10"},
    },
    "agents": {"human": {"room": "kitchen", "known": []},
               "robot": {"room": "livingroom",
                         "known": ["plate.7", "fork.9"]}},
    "goal_space": [
        {"family": "household", "name": "set_table_mini", "predicates": [
            {"category": "plate", "count": 1, "targets": ["kitchentable.1"]},
            {"category": "fork", "count": 1, "targets": ["kitchentable.1"]}]},
        {"family": "household", "name": "snack_mini", "predicates": [
            {"category": "apple", "count": 1, "targets": ["kitchentable.1"]}]},
    ],
    "true_goal": "set_table_mini",
})

scenarios.append({
    "name": "tiny_kitchen",
    "family": "kitchen",
    "condition": 1,
    "seed": 0,
    "rooms": {"kitchen_a": {"adjacent": ["kitchen_b"]},
              "kitchen_b": {"adjacent": ["kitchen_a"]}},
    "containers": {"fridge.21": {"room": "kitchen_a", "open": False},
                   "cabinet.31": {"room": "kitchen_b", "open": False}},
    "surfaces": {"counter.2": {"room": "kitchen_a"},
                 "servingcounter.4": {"room": "kitchen_a", "serving": True},
                 "servingcounter.5": {"room": "kitchen_b", "serving": True}},
    "objects": {
        "noodle.2": {"category": "noodle", "location": "fridge.21"},
        "egg.5": {"category": "egg", "location": "cabinet.31"},
    },
    "agents": {"human": {"room": "kitchen_a", "known": []},
               "robot": {"room": "kitchen_b",
                         "known": ["noodle.2", "egg.5"]}},
    "goal_space": [
        {"family": "kitchen", "name": "ramen_mini", "ingredients": [
            {"category": "noodle", "status": "cooked"},
            {"category": "egg", "status": "cooked"}]},
    ],
    "true_goal": "ramen_mini",
})

for cfg in scenarios:
    path = OUT / f"{cfg['name']}.json"
    path.write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    print("wrote", path)
