"""Prompt templates, shipped as editable YAML fixtures.

Each file under ``GCOP_PROMPTS_DIR`` holds a ``system`` and a ``user``
template with ``$placeholder`` substitutions (:class:`string.Template`).
"""

from typing import Optional, Tuple
from pathlib import Path
from string import Template
import functools

import yaml
from django.conf import settings
from pydantic import BaseModel


__all__ = (
    'PromptTemplate',
    'PromptNotFound',
    'load_prompt',
)


class PromptNotFound(RuntimeError):
    """No template file with given name exists."""
    pass


class PromptTemplate(BaseModel):
    name: str
    system: str
    user: str

    class Config:
        allow_mutation = False

    def render(self, **values: str) -> Tuple[str, str]:
        """Fills placeholders in.

        :returns: ``(system_prompt, user_content)``
        :raises ValueError: a placeholder has no value
        """
        try:
            return (
                Template(self.system).substitute(values).strip(),
                Template(self.user).substitute(values).strip(),
            )
        except KeyError as err:
            raise ValueError(
                f"Prompt {self.name} needs a value for {err.args[0]}")


@functools.lru_cache(maxsize=64)
def _read(path: Path) -> PromptTemplate:
    with open(path, 'r', encoding='utf-8') as fh:
        data = yaml.safe_load(fh)
    return PromptTemplate(name=path.stem, **data)


def load_prompt(name: str, prompts_dir: Optional[Path] = None) \
        -> PromptTemplate:
    """Reads the template called ``name``
    (e.g. ``propose``, ``guided_math``).

    :raises PromptNotFound:
    :raises pydantic.ValidationError: the file lacks a section
    """
    path = Path(prompts_dir or settings.PROMPTS_DIR) / f'{name}.yaml'
    if not path.is_file():
        raise PromptNotFound(f"No prompt template at {path}")
    return _read(path)
