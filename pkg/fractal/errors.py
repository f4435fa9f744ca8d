"""Erreurs typées de la boîte à outils.

Chaque erreur porte un `code` stable, repris tel quel dans le JSON d'erreur
de la ligne de commande.
"""


class FractalError(Exception):
    code = "fractal_error"
    exit_code = 3

    def to_dict(self) -> dict[str, str]:
        return {"error": self.code, "type": type(self).__name__, "message": str(self)}


class DomainError(FractalError, ValueError):
    """Argument mathématiquement invalide (poids négatif, r <= 0, chiffre hors de B...)"""
    code = "domain_error"


class UsageError(FractalError, ValueError):
    """Appel mal formé (longueurs différentes, grille de rayons trop courte...)"""
    code = "usage_error"
    exit_code = 2


class UnsupportedError(FractalError, NotImplementedError):
    """Régime non couvert, typiquement un IFS avec chevauchement"""
    code = "unsupported"


class SizeError(FractalError, MemoryError):
    """Matrice de Gram trop grande"""
    code = "size_error"


class CertificateError(FractalError, ArithmeticError):
    """Certificat de résidu non atteint par le solveur propre"""
    code = "certificate_error"
