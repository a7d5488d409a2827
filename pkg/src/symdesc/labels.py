ENTITY_TYPES = ("SYMBOL", "PRIMARY", "ORDERED")
RELATION_TYPES = ("Direct", "Count", "Corefer-Symbol", "Corefer-Description")
DOMAINS = ("cs", "econ", "math", "physics", "unknown")

ENTITY_INDEX = {name: i for i, name in enumerate(ENTITY_TYPES)}
RELATION_INDEX = {name: i for i, name in enumerate(RELATION_TYPES)}
