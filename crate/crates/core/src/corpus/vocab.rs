//! Word lists for generated stories. The four noun lists are disjoint.

pub(crate) const NAMES: &[&str] = &[
    "Abigail",
    "Aiden",
    "Alexander",
    "Amelia",
    "Aria",
    "Avery",
    "Benjamin",
    "Carter",
    "Charlotte",
    "Chloe",
    "Elizabeth",
    "Ella",
    "Emily",
    "Emma",
    "Ethan",
    "Evelyn",
    "Hannah",
    "Harper",
    "Hunter",
    "Isabella",
    "Isla",
    "Jack",
    "Jackson",
    "Jacob",
    "Jayden",
    "Liam",
    "Lily",
    "Logan",
    "Lucas",
    "Mason",
    "Mia",
    "Mila",
    "Nathan",
    "Noah",
    "Oliver",
    "Olivia",
    "Owen",
    "Sophia",
    "William",
];

pub(crate) const LOCATIONS: &[&str] = &[
    "attic",
    "back yard",
    "basement",
    "bathroom",
    "bedroom",
    "cellar",
    "closet",
    "dining room",
    "front yard",
    "garage",
    "garden",
    "hall",
    "hallway",
    "kitchen",
    "laundry",
    "living room",
    "lounge",
    "master bedroom",
    "office",
    "patio",
    "playroom",
    "porch",
    "staircase",
    "study",
    "sunroom",
    "TV room",
    "workshop",
];

pub(crate) const CONTAINERS: &[&str] = &[
    "basket",
    "bathtub",
    "blue container",
    "bottle",
    "box",
    "bucket",
    "cabinet",
    "crate",
    "cupboard",
    "drawer",
    "envelope",
    "green basket",
    "green bucket",
    "pantry",
    "red box",
    "red envelope",
    "suitcase",
    "treasure chest",
];

/// Things that get moved around.
pub(crate) const OBJECTS: &[&str] = &[
    "apple",
    "asparagus",
    "banana",
    "beans",
    "belt",
    "boots",
    "cabbage",
    "carrot",
    "celery",
    "cherry",
    "coat",
    "corn",
    "cucumber",
    "grapefruit",
    "grapes",
    "hat",
    "jacket",
    "keys",
    "lemon",
    "lettuce",
    "lime",
    "melon",
    "onion",
    "orange",
    "peach",
    "pear",
    "peas",
    "persimmon",
    "pineapple",
    "potato",
    "pumpkin",
    "radish",
    "spinach",
    "strawberry",
    "sweet potato",
    "tangerine",
    "tomato",
    "turnip",
    "underpants",
    "watermelon",
];

/// Objects of `X dislikes the Y` distractors.
pub(crate) const DISLIKES: &[&str] = &[
    "apple",
    "asparagus",
    "beans",
    "broccoli",
    "cabbage",
    "carrot",
    "celery",
    "eggplant",
    "lemon",
    "onion",
    "peas",
    "pumpkin",
    "radish",
    "spinach",
    "tomato",
    "turnip",
];

/// Objects of `X is wearing the Y` distractors.
pub(crate) const WEARABLES: &[&str] = &[
    "belt",
    "boots",
    "cap",
    "coat",
    "gloves",
    "hat",
    "jacket",
    "jeans",
    "pajamas",
    "scarf",
    "shirt",
    "shoes",
    "skirt",
    "slacks",
    "slippers",
    "socks",
    "stockings",
    "sweater",
    "tie",
    "trousers",
    "undershirt",
];
