from .app import create_app
from .store import SCHEMA_VERSION, AnnotationStore, ServiceError

__all__ = ["AnnotationStore", "SCHEMA_VERSION", "ServiceError", "create_app"]
