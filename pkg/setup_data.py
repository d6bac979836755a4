"""
Setup script to write the sample datasets under data/
"""
import os

from bowtie.ingest.parsers import write_edge_list, write_metadata
from bowtie.macrostructure import write_labels
from bowtie.models.models import ComponentLabel
from bowtie.synth import PlantSpec, canon11_graph, oracle_classify, planted_bowtie, synthetic_metadata


def write_sample(directory, graph, expected, seed=0):
    """Write edges, metadata and expected labels for one sample"""
    os.makedirs(directory, exist_ok=True)
    write_edge_list(graph.external_arcs(), os.path.join(directory, 'edges.txt'))
    write_metadata(synthetic_metadata(graph, seed=seed), os.path.join(directory, 'meta.csv'))
    write_labels(expected, os.path.join(directory, 'expected_labels.csv'))
    print(f"Wrote {graph.node_count} nodes and {graph.arc_count} arcs to {directory}")


def setup_samples():
    """Write the eleven-node example and a planted sample"""
    data_dir = os.path.join(os.path.dirname(__file__), 'data')

    graph = canon11_graph()
    write_sample(os.path.join(data_dir, 'canon11'), graph, oracle_classify(graph))

    spec = PlantSpec(
        sizes={
            ComponentLabel.LSC: 400,
            ComponentLabel.IN: 150,
            ComponentLabel.OUT: 250,
            ComponentLabel.IN_TENDRILS: 40,
            ComponentLabel.OUT_TENDRILS: 60,
            ComponentLabel.BRIDGES: 20,
            ComponentLabel.OTHER: 30,
            ComponentLabel.DISCONNECTED: 50,
        },
        lsc_extra_arcs=2000,
        depth={ComponentLabel.OUT: 3, ComponentLabel.IN: 2},
        seed=7,
    )
    graph, expected = planted_bowtie(spec)
    write_sample(os.path.join(data_dir, 'planted'), graph, expected, seed=spec.seed)


if __name__ == '__main__':
    setup_samples()
    print("\nSetup complete!")
