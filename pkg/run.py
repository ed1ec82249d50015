"""WSGI entry point; ``gunicorn run:app`` serves the experiment API."""
import os

from core_app import create_app

app = create_app()

if __name__ == "__main__":
    app.run(port=int(os.getenv("PORT", "5000")), debug=os.getenv("FLASK_DEBUG") == "1")
