from abc import ABC, abstractmethod

from .render_settings import RenderSettings


class Renderer(ABC):
    """Base class for all figure renderers"""

    @abstractmethod
    def render(self, spec, settings: RenderSettings = None) -> str:
        """Render a figure specification to document text"""
        pass

    @abstractmethod
    def get_default_settings(self) -> RenderSettings:
        """Get default rendering settings for this renderer"""
        pass

    @abstractmethod
    def validate_settings(self, settings: RenderSettings) -> bool:
        """Validate that the settings are appropriate for this renderer"""
        pass
