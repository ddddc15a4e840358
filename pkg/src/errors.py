from .config import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL


class HmergmError(Exception):
    """
    Erreur de base de l'application; porte le code de sortie de la CLI
    """
    exit_code = EXIT_CONFIG


class ConfigError(HmergmError):
    """Configuration ou usage invalide"""
    exit_code = EXIT_CONFIG


class SpecError(ConfigError):
    """Spécification de modèle invalide"""


class DataError(HmergmError):
    exit_code = EXIT_DATA


class NetworkError(DataError):
    """Réseau, couche ou empilement de couches invalide"""


class ParseError(DataError):
    """
    Erreur de lecture d'un fichier, avec chemin et numéro de ligne (base 1)
    """

    def __init__(self, message: str, path=None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f", ligne {line}"
            location += ": "
        super().__init__(f"{location}{message}")


class NumericalError(HmergmError):
    exit_code = EXIT_NUMERICAL
