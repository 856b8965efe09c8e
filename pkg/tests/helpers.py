TABLE1_PARTITION = [
    {"Hr 9"},
    {"Hr 11"},
    {"Hr 3", "Hr 4"},
    {"Hr 5", "Hr 6"},
    {f"Hr {i}" for i in range(1, 21)} - {"Hr 3", "Hr 4", "Hr 5", "Hr 6", "Hr 9", "Hr 11"},
]


def as_sets(partition):
    """Partition mapping -> list of label sets in a canonical order"""
    groups = {}
    for label, cluster in partition.items():
        groups.setdefault(cluster, set()).add(label)
    return sorted(groups.values(), key=lambda group: sorted(group))


def same_partition(partition, expected):
    return as_sets(partition) == sorted(expected, key=lambda group: sorted(group))
