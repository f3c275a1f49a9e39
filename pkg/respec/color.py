import logging
import sys


class Color:
    """
    ANSI colouring of console text.
    """
    colors = {
        "normal": "\033[0m",
        "gray": "\033[1;38;5;240m",
        "red": "\033[31m",
        "green": "\033[32m",
        "yellow": "\033[33m",
        "blue": "\033[34m",
        "bold": "\033[1m",
        "underline": "\033[4m",
        "underline_off": "\033[24m",
    }

    @staticmethod
    def colorify(text, attrs):
        """Wrap text in the escape codes of the given space separated attributes."""
        colors = Color.colors
        codes = [colors[attr] for attr in attrs.split() if attr in colors]
        if not codes:
            return text
        closing = [colors["underline_off"]] if colors["underline"] in codes else []
        return "".join(codes + [text] + closing + [colors["normal"]])


LEVEL_ATTRS = {
    logging.DEBUG: "gray",
    logging.INFO: "green",
    logging.WARNING: "yellow",
    logging.ERROR: "red bold",
    logging.CRITICAL: "red bold underline",
}


class ColorFormatter(logging.Formatter):
    """ Colours the level name when writing to a terminal
    """

    def __init__(self, fmt="%(levelname)s %(name)s: %(message)s", use_color=None):
        super().__init__(fmt)
        if use_color is None:
            use_color = sys.stderr.isatty()
        self.use_color = use_color

    def format(self, record):
        text = super().format(record)
        if not self.use_color:
            return text
        attrs = LEVEL_ATTRS.get(record.levelno, "")
        return Color.colorify(text, attrs)


def install_handler(verbose=False, stream=None):
    """ One stderr handler on the package logger
    """
    logger = logging.getLogger("respec")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(ColorFormatter())
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return handler
