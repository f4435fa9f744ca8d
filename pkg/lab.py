# Python 3.11

# |----------Module d'environnement-----------|
from os import sep
from os.path import join
from dotenv import load_dotenv
from pathlib import Path
import glob
import importlib
import json
# |----------Module du projet-----------|
import click

from fractal.cog import Cog
from fractal.errors import FractalError
from logs.logger_config import setup_logger


logger = setup_logger()


# env const
PARENT_FOLDER = Path(__file__).resolve().parent
load_dotenv(dotenv_path=join(PARENT_FOLDER, ".env"))


IGNORED_EXTENSIONS = ['__pycache__']


class FrameLab(click.Group):
    """Laboratoire de mesures de frame : une sous-commande par extension de plugins/"""

    def __init__(self) -> None:
        super().__init__(name="fractal-lab", help=self.__doc__)
        self.IGNORED_EXTENSIONS = IGNORED_EXTENSIONS
        self.cogs: dict[str, Cog] = {}

    def load_all_extensions(self) -> None:
        for plugin in sorted(glob.glob(join(PARENT_FOLDER, "plugins", "*", "main.py"))):
            extension = plugin.split(sep)[-2]
            if extension not in self.IGNORED_EXTENSIONS:
                try:
                    module = importlib.import_module(f"plugins.{extension}.main")
                    module.setup(self)
                    logger.info(f"Extension {extension} chargée")
                except Exception as error:
                    logger.error(f"Extension {extension} : {error}")

    def add_cog(self, cog: Cog) -> None:
        self.cogs[type(cog).__name__] = cog
        for command in cog.get_commands():
            self.add_command(command)

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except FractalError as error:
            self.send_error(error)
            ctx.exit(error.exit_code)

    @staticmethod
    def send_error(error: FractalError) -> None:
        """Erreur lisible par machine sur stdout, détail dans les logs"""
        logger.error(f"{type(error).__name__} : {error}")
        click.echo(json.dumps(error.to_dict(), ensure_ascii=False))


def build_lab() -> FrameLab:
    lab = FrameLab()
    lab.load_all_extensions()
    return lab


def main() -> None:
    build_lab()()


if __name__ == '__main__':
    main()
