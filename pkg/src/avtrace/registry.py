"""Named factories for pluggable components (backbones)."""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from typing import Any, Callable

from avtrace._errors import ConfigError


def import_symbol(path: str) -> Any:
    module_path, _, symbol_name = path.rpartition(".")
    if not module_path:
        raise ValueError(f"Invalid import path: {path}")
    module = importlib.import_module(module_path)
    return getattr(module, symbol_name)


@dataclass(frozen=True)
class ComponentFactory:
    name: str
    factory: Callable[..., Any]

    def build(self, **kwargs: Any) -> Any:
        return self.factory(**kwargs)


class ComponentRegistry:
    """Maps tags to factories; a tag containing a dot is read as an import path.

    Usage:
        registry = ComponentRegistry()
        registry.register("small_resnet", small_resnet)
        module, width = registry.build("small_resnet", width=16, pretrained=False)
        registry.build("mypkg.backbones.tiny", width=16, pretrained=False)
    """

    def __init__(self) -> None:
        self._registry: dict[str, ComponentFactory] = {}

    def register(self, name: str, factory: Callable[..., Any]) -> None:
        if name in self._registry:
            raise ValueError(f"Component '{name}' already registered.")
        self._registry[name] = ComponentFactory(name=name, factory=factory)

    def names(self) -> list[str]:
        return sorted(self._registry)

    def get(self, name: str) -> ComponentFactory:
        if name in self._registry:
            return self._registry[name]
        if "." in name:
            try:
                return ComponentFactory(name=name, factory=import_symbol(name))
            except (ImportError, AttributeError) as exc:
                raise ConfigError(f"cannot import component '{name}': {exc}") from exc
        raise ConfigError(f"Component '{name}' not found; known: {self.names()}")

    def build(self, name: str, **kwargs: Any) -> Any:
        return self.get(name).build(**kwargs)
