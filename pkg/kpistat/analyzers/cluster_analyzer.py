import logging
import re
from typing import Dict, List

import numpy as np

from .base_analyzer import BaseAnalyzer
from ..errors import DomainError, InvalidDistanceMatrix
from ..models import Dendrogram, DistanceMatrix, Linkage, Merge

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
_NEWICK_PLAIN = re.compile(r"^[A-Za-z0-9_.\-]+$")


class ClusterAnalyzer(BaseAnalyzer):
    """Agglomerative hierarchical clustering and partition extraction"""

    @staticmethod
    def validate(distances: DistanceMatrix) -> np.ndarray:
        d = ClusterAnalyzer.as_square(distances.d, "distance matrix")
        if d.shape[0] != len(distances.labels):
            raise InvalidDistanceMatrix(
                f"{d.shape[0]}x{d.shape[0]} matrix for {len(distances.labels)} labels"
            )
        scale = max(1.0, float(np.max(np.abs(d)))) if d.size else 1.0
        if np.any(d < 0):
            raise InvalidDistanceMatrix("distances must be nonnegative")
        if np.max(np.abs(d - d.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
            raise InvalidDistanceMatrix("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise InvalidDistanceMatrix("distance matrix diagonal must be zero")
        return d

    @staticmethod
    def agglomerate(distances: DistanceMatrix, linkage: Linkage = Linkage.COMPLETE) -> Dendrogram:
        """
        Merge the closest pair of clusters until one remains (Lance-Williams updates).

        Among equally close pairs the lexicographically smallest (smaller id, larger id)
        wins, so the merge sequence is fully deterministic.
        """
        d = ClusterAnalyzer.validate(distances)
        n = d.shape[0]
        ClusterAnalyzer.require_samples(n, 2)

        # distance between active clusters, keyed by (smaller id, larger id)
        between: Dict[tuple, float] = {(i, j): float(d[i, j]) for i in range(n) for j in range(i + 1, n)}
        sizes = {i: 1 for i in range(n)}
        active: List[int] = list(range(n))
        merges: List[Merge] = []

        for new_id in range(n, 2 * n - 1):
            best_pair, best_height = None, None
            for a_index, a in enumerate(active):
                for b in active[a_index + 1:]:
                    height = between[(a, b)]
                    if best_height is None or height < best_height:
                        best_pair, best_height = (a, b), height
            a, b = best_pair
            active.remove(a)
            active.remove(b)
            size_a, size_b = sizes.pop(a), sizes.pop(b)
            for other in active:
                d_a = between.pop((min(a, other), max(a, other)))
                d_b = between.pop((min(b, other), max(b, other)))
                if linkage == Linkage.COMPLETE:
                    merged = max(d_a, d_b)
                elif linkage == Linkage.SINGLE:
                    merged = min(d_a, d_b)
                else:
                    merged = (size_a * d_a + size_b * d_b) / (size_a + size_b)
                between[(other, new_id)] = merged
            del between[(a, b)]
            active.append(new_id)
            sizes[new_id] = size_a + size_b
            merges.append(Merge(left=a, right=b, height=best_height, size=size_a + size_b))

        logger.debug("Agglomerated %d leaves with %s linkage", n, linkage.value)
        return Dendrogram(leaf_labels=list(distances.labels), merges=merges)

    @staticmethod
    def cut(tree: Dendrogram, k: int) -> Dict[str, int]:
        """Partition into k clusters by undoing the last k-1 merges"""
        n = len(tree.leaf_labels)
        if not 1 <= k <= n:
            raise DomainError(f"k must be between 1 and {n}, got {k}")

        parent = list(range(2 * n - 1))

        def find(node: int) -> int:
            while parent[node] != node:
                parent[node] = parent[parent[node]]
                node = parent[node]
            return node

        for offset, merge in enumerate(tree.merges[: n - k]):
            node = n + offset
            parent[find(merge.left)] = node
            parent[find(merge.right)] = node

        cluster_ids: Dict[int, int] = {}
        partition: Dict[str, int] = {}
        for leaf, label in enumerate(tree.leaf_labels):
            root = find(leaf)
            if root not in cluster_ids:
                cluster_ids[root] = len(cluster_ids)
            partition[label] = cluster_ids[root]
        return partition

    @staticmethod
    def clusters(partition: Dict[str, int]) -> List[List[str]]:
        """Group labels by cluster id"""
        groups: Dict[int, List[str]] = {}
        for label, cluster in partition.items():
            groups.setdefault(cluster, []).append(label)
        return [groups[cluster] for cluster in sorted(groups)]

    @staticmethod
    def leaf_order(tree: Dendrogram) -> List[str]:
        """Leaves in left-first depth-first order"""
        n = len(tree.leaf_labels)
        order: List[str] = []
        stack = [n + len(tree.merges) - 1] if tree.merges else list(range(n))[::-1]
        while stack:
            node = stack.pop()
            if node < n:
                order.append(tree.leaf_labels[node])
            else:
                merge = tree.merges[node - n]
                stack.append(merge.right)
                stack.append(merge.left)
        return order

    @staticmethod
    def node_heights(tree: Dendrogram) -> List[float]:
        n = len(tree.leaf_labels)
        return [0.0] * n + [merge.height for merge in tree.merges]

    @staticmethod
    def to_newick(tree: Dendrogram) -> str:
        n = len(tree.leaf_labels)
        heights = ClusterAnalyzer.node_heights(tree)

        def label_text(label: str) -> str:
            if _NEWICK_PLAIN.match(label):
                return label
            return "'" + label.replace("'", "''") + "'"

        def render(node: int) -> str:
            if node < n:
                return label_text(tree.leaf_labels[node])
            merge = tree.merges[node - n]
            children = []
            for child in (merge.left, merge.right):
                branch = heights[node] - heights[child]
                children.append(f"{render(child)}:{branch:.6g}")
            return "(" + ",".join(children) + ")"

        if not tree.merges:
            return label_text(tree.leaf_labels[0]) + ";"
        return render(n + len(tree.merges) - 1) + ";"
