"""
Parsing Package - transitions, token representations, parser and tagger networks
"""

from .transitions import (
    SHIFT,
    Action,
    ActionKind,
    ParserConfiguration,
    action_index,
    action_inventory,
    apply,
    initial_configuration,
    legal_actions,
    oracle,
    tree_from_arcs,
)
from .representations import DropoutState, LexicalResources, TokenEncoder, block_dropout
from .parser_model import ParserNetwork, ParseResult, legal_action_ids
from .tagger_model import TaggerNetwork
from .model import MultilingualModel, SentenceLoss

__all__ = [
    "SHIFT",
    "Action",
    "ActionKind",
    "ParserConfiguration",
    "action_index",
    "action_inventory",
    "apply",
    "initial_configuration",
    "legal_actions",
    "oracle",
    "tree_from_arcs",
    "DropoutState",
    "LexicalResources",
    "TokenEncoder",
    "block_dropout",
    "ParserNetwork",
    "ParseResult",
    "legal_action_ids",
    "TaggerNetwork",
    "MultilingualModel",
    "SentenceLoss",
]
