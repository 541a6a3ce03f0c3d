import logging
import os
from typing import List, Optional, Tuple, Union

from stabmc.diagnostics import Diagnostic, error, has_errors
from stabmc.errors import FrontendError
from stabmc.lexer import tokenize
from stabmc.parser import parse_program
from stabmc.typecheck import TypedProgram, typecheck

logger = logging.getLogger(__name__)


def compile_source(source: Union[str, bytes]) -> Tuple[Optional[TypedProgram], List[Diagnostic]]:
    """tokenize -> parse -> typecheck; stops at the first stage reporting errors."""
    tokens, diagnostics = tokenize(source)
    if has_errors(diagnostics):
        return None, diagnostics
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    try:
        program, parse_diags = parse_program(tokens, text)
        diagnostics = diagnostics + parse_diags
        if program is None or has_errors(diagnostics):
            return None, diagnostics
        typed, type_diags = typecheck(program)
    except RecursionError:
        logger.debug("[PARSE] recursion limit hit while compiling")
        return None, diagnostics + [error(tokens[0].line, tokens[0].column, "expression nested too deeply")]
    diagnostics = diagnostics + type_diags
    if typed is not None:
        logger.info(f"[PARSE] {typed.name}: {len(typed.processes)} process(es), "
                    f"{len(typed.properties)} propert{'y' if len(typed.properties) == 1 else 'ies'}")
    return typed, diagnostics


def load_program(path_or_text: Union[str, bytes, os.PathLike]) -> TypedProgram:
    """Compile a model file (or model text); raises FrontendError on any error."""
    if isinstance(path_or_text, os.PathLike) or (
            isinstance(path_or_text, str) and "\n" not in path_or_text and os.path.isfile(path_or_text)):
        with open(path_or_text, "rb") as f:
            source = f.read()
    else:
        source = path_or_text
    program, diagnostics = compile_source(source)
    for d in diagnostics:
        if not d.is_error:
            logger.warning(f"[PARSE] {d}")
    if program is None:
        raise FrontendError(diagnostics)
    return program
