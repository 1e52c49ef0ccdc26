"""Exception hierarchy for panelcause."""


class PanelCauseError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateRecord(PanelCauseError):
    def __init__(self, player_id: str, season: int):
        self.player_id = player_id
        self.season = season
        super().__init__(f"duplicate record for player {player_id!r} in {season}")


class InvariantViolation(PanelCauseError):
    def __init__(self, field: str, value, detail: str = ""):
        self.field = field
        self.value = value
        msg = f"invariant violated for {field}={value!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class PanelValidationError(PanelCauseError):
    """Raised with every per-record problem found during validation."""

    def __init__(self, problems: list[PanelCauseError]):
        self.problems = problems
        lines = "\n".join(f"  - {p}" for p in problems)
        super().__init__(f"{len(problems)} invalid record(s):\n{lines}")


class SchemaError(PanelCauseError):
    def __init__(self, line: int, column: str, detail: str = ""):
        self.line = line
        self.column = column
        msg = f"line {line}, column {column!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class MissingSeason(PanelCauseError):
    def __init__(self, unit, season: int):
        self.unit = unit
        self.season = season
        super().__init__(f"no value for {unit} in season {season}")


class MissingShiftRate(PanelCauseError):
    def __init__(self, player_id: str):
        self.player_id = player_id
        super().__init__(f"no 2022 shift rate for player {player_id!r}")


class MissingCovariate(PanelCauseError):
    def __init__(self, player_id: str, label: str):
        self.player_id = player_id
        self.label = label
        super().__init__(f"player {player_id!r} lacks covariate {label!r}")


class EmptyDonorPool(PanelCauseError):
    def __init__(self, target_id: str):
        self.target_id = target_id
        super().__init__(f"no eligible donors for target {target_id!r}")


class SolverFailure(PanelCauseError):
    pass


class DegeneratePreFit(PanelCauseError):
    pass


class DegenerateDesign(PanelCauseError):
    pass


class AnalysisNotRun(PanelCauseError):
    def __init__(self, figure_id: str, detail: str = ""):
        self.figure_id = figure_id
        msg = f"figure {figure_id!r} unavailable"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
