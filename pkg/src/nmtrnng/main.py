import sys

import click

from .exceptions import DataError, ValidationFailure
from .ui.cli import cli
from .utils.logger import logger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VALIDATION = 3


def main(argv=None):
    """
    Run the command group and map failures to exit codes

    Returns:
        int: 0 success, 1 usage, 2 bad data or configuration, 3 failed validation
    """
    try:
        result = cli.main(args=argv, prog_name="nmtrnng", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except DataError as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except ValidationFailure as e:
        logger.error(f"Validation failed: {e}")
        return EXIT_VALIDATION
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
