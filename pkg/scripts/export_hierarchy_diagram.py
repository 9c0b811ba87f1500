"""
Use this file to export the implication diagram between the urelement axioms as JSON and DOT files
"""
import argparse
import json
import logging
import os
import sys

sys.path.append(os.path.abspath('..'))
from urforcing.axiom_lab import diagram_to_dot, hierarchy_edges

logger = logging.getLogger("UrforcingDiagramExport")

def export_diagram(output_dir, name):
    os.makedirs(output_dir, exist_ok=True)
    edges = hierarchy_edges()
    json_path = os.path.join(output_dir, name + '.json')
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump([edge.to_json() for edge in edges], f, indent=4, ensure_ascii=False)
    dot_path = os.path.join(output_dir, name + '.dot')
    with open(dot_path, "w", encoding="utf-8") as f:
        f.write(diagram_to_dot(edges))
    logger.info(f"Diagram with {len(edges)} edges written to {json_path} and {dot_path}")
    return json_path, dot_path

if __name__ == '__main__':
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler()]
    )
    parser = argparse.ArgumentParser(description='Export the urelement axiom implication diagram')
    parser.add_argument(
        "--output_dir",
        default=".",
        help="Directory where the JSON and DOT files are written",
    )
    parser.add_argument(
        "--name",
        default="urelement_axioms",
        help="Base name of the output files",
    )
    args = parser.parse_args()

    export_diagram(args.output_dir, args.name)
