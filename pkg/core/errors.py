"""
Gerarchia delle eccezioni di HubLine.
La CLI traduce ciascuna famiglia in un codice di uscita.
"""

from typing import List, Optional


class HubLineError(Exception):
    """Base di tutte le eccezioni del progetto."""


class ValidationError(HubLineError):
    """Dati di input che violano un invariante del modello."""


class ParseError(ValidationError):
    """File malformato; riporta file e numero di riga."""

    def __init__(self, message: str, path=None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(f"{where}{message}")


class ContractViolation(HubLineError):
    """Precondizione di un'operazione non rispettata dal chiamante."""


class DomainError(ValidationError):
    """Argomento fuori dal dominio di una funzione di gravità/profitto."""


class InvalidCombinationError(ValidationError):
    """Combinazione di opzioni non ammessa (es. ineq_new con f2l)."""


class CoordinateError(ValidationError):
    """Nodo privo di coordinate richieste per l'export geografico."""


class CappedEnumerationError(HubLineError):
    """Enumerazione interrotta dal limite k_cap."""

    def __init__(self, count: int, message: str = ""):
        self.count = count
        super().__init__(message or f"enumerazione interrotta dopo {count} cammini")


class GuardRefusalError(HubLineError):
    """Istanza troppo grande per l'enumerazione esaustiva."""

    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"stima di {estimate} linee oltre il limite {cap}")


class NodeLimitError(HubLineError):
    """Branch-and-bound oltre il limite di nodi."""

    def __init__(self, expanded: int):
        self.expanded = expanded
        super().__init__(f"branch-and-bound interrotto dopo {expanded} nodi")


class InfeasibleAssignmentError(ValidationError):
    """Assegnamento MILP che viola vincoli; porta l'elenco delle violazioni."""

    def __init__(self, violations: List):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5})" if len(self.violations) > 5 else ""
        super().__init__(f"{len(self.violations)} vincoli violati: {head}{more}")
