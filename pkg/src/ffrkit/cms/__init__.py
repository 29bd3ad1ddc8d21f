from .store import CmsItem, CmsStore, CmsTask, replay
from .service import create_app, serve

__all__ = ["CmsItem", "CmsStore", "CmsTask", "replay", "create_app", "serve"]
