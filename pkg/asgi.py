"""ASGI entrypoint; loads a local .env before the app reads its settings."""
from dotenv import load_dotenv

load_dotenv()

from src.api import app  # noqa: E402,F401
