"""
Grammar container, rule extraction, binarization and tree derivation.
"""
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, islice, product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from src.grammar.symbols import Rule, RuleKind, Symbol, SymbolKind, make_rule
from src.grammar.tree import ParseNode, leaf_node
from src.scene.model import Scene
from src.scene.tree import GroundTruthTree
from src.utils.config import settings
from src.utils.errors import CyclicGrammarError, NotDerivableError, SchemaError
from src.utils.logging import get_logger

logger = get_logger("grammar.grammar")


def infer_intermediates(rules: Iterable[Rule]) -> Set[str]:
    """
    Find intermediate symbols by their naming contract.

    A symbol is intermediate when one of its rules lists parts whose leaf parts,
    joined with underscores in listing order, spell the symbol's name.
    """
    rules = list(rules)
    expansion: Dict[str, List[str]] = {}
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.lhs in expansion or "_" not in rule.lhs:
                continue
            parts: List[str] = []
            for sym in rule.rhs:
                parts.extend(expansion.get(sym, [sym]))
            if len(parts) >= 2 and "_".join(parts) == rule.lhs:
                expansion[rule.lhs] = parts
                changed = True
    return set(expansion)


@dataclass(frozen=True, eq=False)
class Grammar:
    """Symbols, rules and the start symbol of a scene grammar."""

    symbols: Mapping[str, Symbol]
    rules: Tuple[Rule, ...]
    start: str

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(sorted(set(self.rules))))
        object.__setattr__(self, "symbols", dict(sorted(self.symbols.items())))

    @classmethod
    def from_rules(
        cls,
        rules: Iterable[Rule],
        start: Optional[str] = None,
        kinds: Optional[Mapping[str, SymbolKind]] = None,
    ) -> "Grammar":
        """
        Build a grammar, inferring symbol kinds not given in ``kinds``.

        Args:
            rules: Production rules
            start: Start symbol name (defaults to the configured one)
            kinds: Explicit symbol kinds, e.g. from a grammar file

        Returns:
            Validated grammar
        """
        start = start or settings.start_symbol
        rules = list(rules)
        kinds = dict(kinds or {})
        intermediates = infer_intermediates(rules)
        names: Set[str] = {start}
        for rule in rules:
            names.add(rule.lhs)
            names.update(rule.rhs)
        symbols = {}
        for name in names:
            if name in kinds:
                kind = kinds[name]
            elif name == start:
                kind = SymbolKind.START
            elif name == settings.terminal_symbol:
                kind = SymbolKind.TERMINAL
            elif name in intermediates:
                kind = SymbolKind.INTERMEDIATE
            else:
                kind = SymbolKind.NONTERMINAL
            symbols[name] = Symbol(name, kind)
        grammar = cls(symbols=symbols, rules=tuple(rules), start=start)
        grammar.validate()
        return grammar

    def validate(self) -> None:
        """Check the structural invariants of the grammar."""
        starts = [s.name for s in self.symbols.values() if s.kind == SymbolKind.START]
        if starts != [self.start]:
            raise SchemaError(f"start: expected exactly one start symbol '{self.start}', found {starts}")
        for rule in self.rules:
            for name in (rule.lhs, *rule.rhs):
                if name not in self.symbols:
                    raise SchemaError(f"rules: symbol '{name}' of rule '{rule}' is not declared")
            if rule.kind == RuleKind.GOAL and rule.lhs != self.start:
                raise SchemaError(f"rules: goal rule '{rule}' must have the start symbol on the left")
            if rule.lhs == self.start and rule.kind != RuleKind.GOAL:
                raise SchemaError(f"rules: rule '{rule}' forms the start symbol but is not a goal rule")
            if self.symbols[rule.lhs].kind == SymbolKind.TERMINAL:
                raise SchemaError(f"rules: terminal '{rule.lhs}' cannot be rewritten")
        used = {name for rule in self.rules for name in rule.rhs}
        unused = [
            s.name
            for s in self.symbols.values()
            if s.kind in (SymbolKind.NONTERMINAL, SymbolKind.INTERMEDIATE) and s.name not in used
        ]
        if unused:
            logger.warning(f"Symbols never used on a right-hand side: {', '.join(unused)}")
        for symbol in self.symbols.values():
            if symbol.kind == SymbolKind.INTERMEDIATE and not self.rules_for(symbol.name):
                raise SchemaError(f"symbols: intermediate '{symbol.name}' has no rule")
        for name in self.intermediates:
            self.leaf_parts(name)

    @cached_property
    def by_lhs(self) -> Dict[str, Tuple[Rule, ...]]:
        grouped: Dict[str, List[Rule]] = defaultdict(list)
        for rule in self.rules:
            grouped[rule.lhs].append(rule)
        return {k: tuple(v) for k, v in grouped.items()}

    def rules_for(self, lhs: str) -> Tuple[Rule, ...]:
        return self.by_lhs.get(lhs, ())

    @cached_property
    def intermediates(self) -> FrozenSet[str]:
        return frozenset(s.name for s in self.symbols.values() if s.kind == SymbolKind.INTERMEDIATE)

    def is_intermediate(self, name: str) -> bool:
        return name in self.intermediates

    @cached_property
    def goal_symbols(self) -> FrozenSet[str]:
        """Symbols a goal rule can turn into the start symbol."""
        return frozenset(r.rhs[0] for r in self.rules if r.kind == RuleKind.GOAL and r.arity == 1)

    @property
    def terminal(self) -> str:
        terminals = [s.name for s in self.symbols.values() if s.kind == SymbolKind.TERMINAL]
        return terminals[0] if terminals else settings.terminal_symbol

    def leaf_counter(self, name: str, _stack: Tuple[str, ...] = ()) -> Counter:
        """Multiset of non-intermediate parts an intermediate expands into."""
        if not self.is_intermediate(name):
            return Counter({name: 1})
        if name in _stack:
            raise CyclicGrammarError(f"intermediate '{name}' is defined in terms of itself: {' -> '.join(_stack + (name,))}")
        rules = self.rules_for(name)
        if not rules:
            raise SchemaError(f"intermediate '{name}' has no rule")
        total: Counter = Counter()
        for sym in rules[0].rhs:
            total += self.leaf_counter(sym, _stack + (name,))
        return total

    def leaf_parts(self, name: str) -> FrozenSet[str]:
        return leaf_parts(name, self)

    def union(self, other: "Grammar") -> "Grammar":
        """Union of symbols and rules; a symbol must keep its kind across both."""
        if self.start != other.start:
            raise SchemaError(f"start: '{self.start}' differs from '{other.start}'")
        kinds = {name: sym.kind for name, sym in self.symbols.items()}
        for name, sym in other.symbols.items():
            if name in kinds and kinds[name] != sym.kind:
                raise SchemaError(f"symbols: '{name}' is {kinds[name].value} in one grammar and {sym.kind.value} in the other")
            kinds[name] = sym.kind
        return Grammar.from_rules(self.rules + other.rules, start=self.start, kinds=kinds)


def leaf_parts(name: str, grammar: Grammar) -> FrozenSet[str]:
    """
    Non-intermediate symbols an intermediate bottoms out into.

    Non-intermediates map to themselves. Every rule of an intermediate contributes.

    Raises:
        CyclicGrammarError: The intermediate's definition loops back onto itself.
    """

    def walk(sym: str, stack: Tuple[str, ...]) -> Set[str]:
        if not grammar.is_intermediate(sym):
            return {sym}
        if sym in stack:
            raise CyclicGrammarError(
                f"intermediate '{sym}' is defined in terms of itself: {' -> '.join(stack + (sym,))}"
            )
        found: Set[str] = set()
        for rule in grammar.rules_for(sym):
            for child in rule.rhs:
                found |= walk(child, stack + (sym,))
        return found

    return frozenset(walk(name, ()))


def _child_symbol(child, terminal: str) -> str:
    return child.label if isinstance(child, GroundTruthTree) else terminal


def extract_rules(trees: Iterable[GroundTruthTree], start: Optional[str] = None) -> List[Rule]:
    """
    Collect one rule per distinct (parent, child-multiset) seen in the trees.

    Args:
        trees: Validated ground-truth trees
        start: Start symbol name

    Returns:
        Rules in order of first appearance
    """
    terminal = settings.terminal_symbol
    found: Dict[Rule, None] = {}
    for tree in trees:
        for node in tree.iter_nodes():
            rule = make_rule(node.label, [_child_symbol(c, terminal) for c in node.children], start)
            found.setdefault(rule, None)
    logger.info(f"Extracted {len(found)} rules")
    return list(found)


def binarize(rules: Iterable[Rule]) -> List[Rule]:
    """
    Split rules so no right-hand side has more than two symbols.

    An n-ary rule becomes a left-branching chain over its listed RHS: the first two
    parts form an intermediate named ``a_b``, which pairs with the third to form
    ``a_b_c``, and so on; the last pair is rewritten by the original LHS.
    """
    out: Dict[Rule, None] = {}
    for rule in rules:
        if rule.arity <= 2:
            out.setdefault(rule, None)
            continue
        current = rule.rhs[0]
        for part in rule.rhs[1:-1]:
            name = f"{current}_{part}"
            out.setdefault(Rule(lhs=name, rhs=(current, part), kind=rule.kind), None)
            current = name
        out.setdefault(Rule(lhs=rule.lhs, rhs=(current, rule.rhs[-1]), kind=rule.kind), None)
    return list(out)


def build_grammar(trees: Sequence[GroundTruthTree], start: Optional[str] = None) -> Grammar:
    """Extract and binarize the rules of a labelled forest."""
    return Grammar.from_rules(binarize(extract_rules(trees, start)), start=start)


MAX_ASSIGNMENTS = 256


def _part_groups(nodes: Sequence[ParseNode], part: Counter, scene: Optional[Scene]) -> List[Tuple[ParseNode, ...]]:
    """Ways to pick the leaf parts of an intermediate from ``nodes``, connected groups first."""
    per_symbol = [
        list(combinations([n for n in nodes if n.symbol == sym], count)) for sym, count in sorted(part.items())
    ]
    groups = [tuple(n for picked in combo for n in picked) for combo in islice(product(*per_symbol), MAX_ASSIGNMENTS)]
    if scene is not None:
        groups.sort(key=lambda g: not scene.is_connected(frozenset().union(*(n.span for n in g))))
    return groups


def derive_tree(tree: GroundTruthTree, grammar: Grammar, scene: Optional[Scene] = None) -> ParseNode:
    """
    Rewrite a ground-truth tree into a derivation of the (binarized) grammar.

    Nodes with more than two children are re-derived through the grammar's
    intermediate symbols; the choice among alternatives is the first matching rule
    in rule order. When several children share a symbol, the parts grouped under an
    intermediate are chosen to form a connected span of ``scene`` where possible.

    Args:
        tree: Ground-truth tree
        grammar: Binarized grammar
        scene: Scene of the tree, used to keep intermediate spans connected

    Raises:
        NotDerivableError: A node has no rule deriving its children.
    """
    terminal = grammar.terminal

    def assign(rhs: Sequence[str], parts: Sequence[Counter], nodes: List[ParseNode]) -> Optional[List[ParseNode]]:
        if not rhs:
            return [] if not nodes else None
        sym, part = rhs[0], parts[0]
        if any(n.symbol == sym for n in nodes):
            options: List[Tuple[ParseNode, ...]] = [(n,) for n in nodes if n.symbol == sym]
        elif grammar.is_intermediate(sym):
            options = _part_groups(nodes, part, scene)
        else:
            return None
        for group in options:
            made = group[0] if len(group) == 1 and group[0].symbol == sym else expand(sym, list(group))
            if made is None:
                continue
            rest = assign(rhs[1:], parts[1:], [n for n in nodes if all(n is not g for g in group)])
            if rest is not None:
                return [made] + rest
        return None

    def expand(lhs: str, nodes: List[ParseNode]) -> Optional[ParseNode]:
        need: Counter = Counter()
        for n in nodes:
            need += grammar.leaf_counter(n.symbol)
        for rule in grammar.rules_for(lhs):
            parts = [grammar.leaf_counter(s) for s in rule.rhs]
            if sum(parts, Counter()) != need:
                continue
            assigned = assign(rule.rhs, parts, nodes)
            if assigned is not None:
                span = frozenset().union(*(n.span for n in assigned))
                return ParseNode(symbol=lhs, span=span, children=tuple(assigned), rule=rule)
        return None

    def walk(node: GroundTruthTree) -> ParseNode:
        children = [
            walk(c) if isinstance(c, GroundTruthTree) else leaf_node(c, terminal)
            for c in node.children
        ]
        derived = expand(node.label, children)
        if derived is None:
            labels = ", ".join(sorted(c.symbol for c in children))
            raise NotDerivableError(
                f"node '{node.label}' over segments {sorted(node.leaves())} is not derivable: "
                f"no rule of '{node.label}' yields [{labels}]"
            )
        return derived

    return walk(tree)


def format_rules(grammar: Grammar) -> str:
    """Rule listing in ``lhs --> a , b`` form, sorted by LHS then RHS."""
    lines = [f"{r.lhs} --> {' , '.join(r.rhs)}" for r in sorted(grammar.rules, key=lambda r: (r.lhs, r.rhs))]
    return "\n".join(lines)
