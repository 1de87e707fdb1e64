"""Formulation Agent - samples candidate components for one stage."""

import dataclasses
from typing import Any, Dict, List, Optional, Union

from autoform.agents.base import BaseAgent
from autoform.agents.parsing import extract_component, parameter_comments
from autoform.agents.prompts import Phase, build_prompt
from autoform.errors import MalformedResponse, SchemaError
from autoform.model.formulation import (
    ConstraintKind,
    ConstraintSet,
    Formulation,
    ObjectiveSpec,
    ParameterTable,
    variables_from_dict,
)
from autoform.model.validation import validate

Payload = Union[ParameterTable, tuple, ObjectiveSpec, ConstraintSet]


def parse_payload(phase: Phase, text: str) -> Payload:
    """
    Read one stage's component out of a completion.

    Raises:
        MalformedResponse: No assignment block, or the block does not fit the schema
    """
    key = phase.component_key
    value, block = extract_component(text, key)
    path = f"$.{key}"
    try:
        if phase is Phase.PARAMETERS:
            return ParameterTable.from_dict(value, path, parameter_comments(block))
        if phase is Phase.VARIABLES:
            return variables_from_dict(value, path)
        if phase is Phase.OBJECTIVE:
            return ObjectiveSpec.from_dict(value, path)
        if phase is Phase.EQUALITIES:
            return ConstraintSet.from_dict(ConstraintKind.EQUALITY, value, path)
        if phase is Phase.INEQUALITIES:
            return ConstraintSet.from_dict(ConstraintKind.INEQUALITY, value, path)
    except SchemaError as e:
        raise MalformedResponse(str(e), block[:200]) from e
    raise ValueError(f"{phase.value} is not a generation phase")


def attach(partial: Formulation, phase: Phase, payload: Payload) -> Formulation:
    """``partial`` extended by one component."""
    if phase is Phase.PARAMETERS:
        return Formulation(parameters=payload, depth=0)
    if phase is Phase.VARIABLES:
        return dataclasses.replace(partial, variables=tuple(payload), depth=1)
    if phase is Phase.OBJECTIVE:
        return dataclasses.replace(partial, objective=payload, depth=2)
    if phase is Phase.EQUALITIES:
        return dataclasses.replace(partial, equalities=payload, depth=3)
    if phase is Phase.INEQUALITIES:
        return dataclasses.replace(partial, inequalities=payload, depth=4)
    raise ValueError(f"{phase.value} is not a generation phase")


class FormulationAgent(BaseAgent):
    """
    Formulation Agent samples H hypotheses for the next component of a
    partial formulation and keeps those that parse and validate.
    """

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "agent_type": "formulation",
            "description": "Samples candidate formulation components",
            "capabilities": [phase.value for phase in Phase if phase.is_generation],
            "inputs": ["problem_description", "partial_formulation"],
            "outputs": ["component_payloads"],
        }

    def generate_candidates(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        h: int,
        seed: Optional[int] = None,
    ) -> List[Payload]:
        """
        Sample ``h`` completions and parse each into the phase's payload.

        Args:
            phase: Generation phase
            problem_text: Problem description
            partial: Formulation the candidates extend
            h: Number of samples
            seed: Optional sampling seed

        Returns:
            Payloads in generation order; malformed or invalid responses are dropped

        Raises:
            BackendError: Transport failure
        """
        if h < 1:
            raise ValueError("h must be >= 1")
        prompt = build_prompt(phase, problem_text, partial)
        responses = self.call_many(prompt, h, seed)
        payloads: List[Payload] = []
        for i, response in enumerate(responses):
            try:
                payload = parse_payload(phase, response)
            except MalformedResponse as e:
                self.logger.warning(f"{phase.value} sample {i} dropped: {e}")
                continue
            violations = validate(attach(partial, phase, payload))
            if violations:
                self.logger.warning(
                    f"{phase.value} sample {i} dropped: {len(violations)} violation(s), first: {violations[0]}"
                )
                continue
            payloads.append(payload)
        self.stream_output(f"{phase.value}: {len(payloads)}/{h} usable samples")
        return payloads

    def candidate_formulations(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        h: int,
        seed: Optional[int] = None,
    ) -> List[Formulation]:
        return [attach(partial, phase, p) for p in self.generate_candidates(phase, problem_text, partial, h, seed)]

    def generate_parameters(self, problem_text: str, seed: Optional[int] = None) -> ParameterTable:
        """
        The shared parameter table for stage 1.

        One call, one retry on a malformed answer, then an empty table.
        """
        for attempt in range(2):
            payloads = self.generate_candidates(Phase.PARAMETERS, problem_text, Formulation(depth=0), 1, seed)
            if payloads:
                return payloads[0]
            self.logger.warning(f"Parameters response unusable (attempt {attempt + 1})")
        self.stream_output("Warning: no usable parameters, continuing with an empty table")
        return ParameterTable()
