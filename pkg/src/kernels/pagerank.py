"""
PageRank workload
Pull-based iterations; each pagerank_calculate call recomputes outgoing
contributions and sums them into every vertex's new score.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..data.graph_loader import EdgeListLoader, Graph
from ..tracing.execution_context import ExecutionContext
from ..utils.config import PAGERANK_DAMPING, PAGERANK_ITERATIONS, PAGERANK_VERTICES
from .base import Workload, WorkloadSpec

STATIC_FN = "pagerank_calculate"


def generate_graph(num_vertices: int, seed: int, extra_out_edges: int = 2) -> Graph:
    """
    Ring plus random chords; every vertex has out-degree >= 1 so no rank leaks
    """
    rng = np.random.default_rng(seed)
    src, dst = [], []
    for v in range(num_vertices):
        targets = {(v + 1) % num_vertices}
        candidates = np.setdiff1d(np.arange(num_vertices), [v, (v + 1) % num_vertices])
        if candidates.size:
            picks = rng.choice(candidates, size=min(extra_out_edges, candidates.size), replace=False)
            targets.update(int(t) for t in picks)
        for t in sorted(targets):
            src.append(v)
            dst.append(t)
    return Graph.from_edges(src, dst, num_vertices)


def cycle_graph(num_vertices: int) -> Graph:
    v = np.arange(num_vertices)
    return Graph.from_edges(v, (v + 1) % num_vertices, num_vertices)


class PageRankWorkload(Workload):
    """
    Iterative PageRank with damping; the output is the score of every vertex
    """

    spec = WorkloadSpec(
        name="pagerank",
        description="Pull-based PageRank, one pagerank_calculate call per iteration",
        static_functions=(STATIC_FN,),
        params={
            'vertices': PAGERANK_VERTICES,
            'iterations': PAGERANK_ITERATIONS,
            'damping': PAGERANK_DAMPING,
            'topology': 'random',
        },
        accepts_input_file=True,
    )

    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        if int(params['iterations']) < 1:
            raise ValueError("pagerank needs iterations >= 1")
        if input_path is not None:
            graph = EdgeListLoader(input_path).load_graph()
        elif params['topology'] == 'cycle':
            graph = cycle_graph(int(params['vertices']))
        elif params['topology'] == 'random':
            graph = generate_graph(int(params['vertices']), seed)
        else:
            raise ValueError(f"Unknown pagerank topology: {params['topology']}")

        in_degree = graph.in_degree()
        out_degree = graph.out_degree()
        return {
            'num_vertices': graph.num_vertices,
            'in_degree': in_degree,
            'out_degree': out_degree,
            'incoming': graph.incoming_sources(),
            'offsets': np.concatenate([[0], np.cumsum(in_degree)]),
        }

    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        op = ctx.op
        n = int(inputs['num_vertices'])
        damping = float(params['damping'])
        base_score = ctx.fmt.cast((1.0 - damping) / n)

        scores = ctx.allocate('scores', np.full(n, 1.0 / n))
        contrib = ctx.allocate('outgoing_contrib', np.zeros(n))

        out_degree = inputs['out_degree']
        in_degree = inputs['in_degree']
        offsets = inputs['offsets']
        incoming = inputs['incoming']
        vertices = np.arange(n)
        # Dangling vertices are never pulled from
        emitters = vertices[out_degree > 0]
        emitter_degree = out_degree[emitters].astype(ctx.dtype)

        for it in range(int(params['iterations'])):
            with ctx.call(STATIC_FN, label=f"iteration{it}"):
                current = ctx.load(scores, emitters)
                ctx.store(contrib, emitters, op(current / emitter_degree))

                pulled = ctx.load(contrib, incoming)
                totals = np.zeros(n, dtype=ctx.dtype)
                has_first = in_degree > 0
                totals[has_first] = pulled[offsets[:-1][has_first]]
                for slot in range(1, int(in_degree.max(initial=0))):
                    active = in_degree > slot
                    totals[active] = op(totals[active] + pulled[offsets[:-1][active] + slot])

                ctx.store(scores, vertices, op(base_score + op(totals * damping)))

        return scores.snapshot()
