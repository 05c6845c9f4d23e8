"""bpmnrisk: non-invasive attack-graph risk analysis for BPMN 2.0 processes.

Pipeline: parse a threat language, ingest a BPMN model, map it to asset
instances, enrich with known vulnerabilities and time-to-compromise, compile
a probabilistic AND/OR attack graph, simulate attackers, and report risk
back onto the original process elements.
"""

__version__ = "0.1.0"
